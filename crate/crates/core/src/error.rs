use alloc::string::String;
use core::fmt;

/// Failure modes shared by every module of the crate.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Replica count outside the supported range.
    UnsupportedSize { k: usize, max: usize },
    /// Gram matrix is singular because `q < k`.
    NonInvertible { k: usize, q: u64 },
    /// Parameter point outside the domain of a formula or construction.
    Domain(String),
    /// Work or memory estimate exceeds the configured budget.
    Budget { required_bytes: u128, limit_bytes: u128 },
    /// Quadrature did not reach the requested tolerance.
    Accuracy { achieved: f64, requested: f64 },
    /// Invalid or inconsistent input parameters.
    InvalidParams(String),
    /// An operation that needs data was handed none.
    EmptyInput,
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnsupportedSize { k, max } => {
                write!(f, "replica count k={k} unsupported (1 <= k <= {max})")
            }
            Error::NonInvertible { k, q } => {
                write!(f, "Gram matrix singular for k={k}, q={q} (needs q >= k)")
            }
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Budget { required_bytes, limit_bytes } => write!(
                f,
                "budget exceeded: needs {required_bytes} bytes, limit {limit_bytes}"
            ),
            Error::Accuracy { achieved, requested } => write!(
                f,
                "quadrature reached {achieved:e}, requested {requested:e}"
            ),
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::EmptyInput => f.write_str("empty input"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
