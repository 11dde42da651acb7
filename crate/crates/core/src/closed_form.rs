//! Closed-form moments of Haar, random MPS and random product state
//! ensembles, evaluated in log space so that `D = d^N` never has to be
//! represented linearly.

use alloc::format;

use crate::error::{Error, Result};
use crate::replica_algebra::{content_polynomial, hook_dimension, partitions};
use crate::special::{ln_factorial, ln_rising, log_sum_exp};
#[cfg(not(feature = "std"))]
use num_traits::Float as _;

/// A positive quantity stored as its natural logarithm.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogValue {
    pub ln: f64,
}

impl LogValue {
    pub fn from_ln(ln: f64) -> Self {
        Self { ln }
    }

    pub fn from_value(v: f64) -> Self {
        debug_assert!(v > 0.0);
        Self { ln: v.ln() }
    }

    /// Linear value; may under- or overflow for extreme inputs.
    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    /// `self / reference - 1`, accurate when the ratio is close to one.
    pub fn delta_vs(self, reference: LogValue) -> f64 {
        (self.ln - reference.ln).exp_m1()
    }

    pub fn ratio_to(self, reference: LogValue) -> f64 {
        (self.ln - reference.ln).exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    Obc,
    Pbc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    Chain,
    /// `L x L` lattice, `N = L²`.
    Square(usize),
}

/// One experiment point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EnsembleParams {
    pub n: usize,
    pub d: usize,
    pub chi: usize,
    pub k: usize,
    pub boundary: Boundary,
    pub geometry: Geometry,
}

impl EnsembleParams {
    pub fn chain(n: usize, d: usize, chi: usize, k: usize, boundary: Boundary) -> Result<Self> {
        Self { n, d, chi, k, boundary, geometry: Geometry::Chain }.validated()
    }

    pub fn square(l: usize, d: usize, chi: usize, k: usize) -> Result<Self> {
        Self { n: l * l, d, chi, k, boundary: Boundary::Obc, geometry: Geometry::Square(l) }
            .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.n == 0 || self.chi == 0 || self.k == 0 {
            return Err(Error::InvalidParams(format!(
                "N, chi and k must be positive (N={}, chi={}, k={})",
                self.n, self.chi, self.k
            )));
        }
        if self.d < 2 {
            return Err(Error::InvalidParams(format!("d must be >= 2, got {}", self.d)));
        }
        if let Geometry::Square(l) = self.geometry {
            if l * l != self.n {
                return Err(Error::InvalidParams(format!("N={} is not L²={}", self.n, l * l)));
            }
        }
        Ok(self)
    }

    pub fn with_k(self, k: usize) -> Self {
        Self { k, ..self }
    }

    /// `ln D = N ln d`.
    pub fn ln_dim(&self) -> f64 {
        ln_dim(self.d, self.n)
    }

    /// `r = log_d χ` as a real number.
    pub fn r(&self) -> f64 {
        (self.chi as f64).ln() / (self.d as f64).ln()
    }

    /// `r` when `χ` is an exact power of `d`.
    pub fn exact_r(&self) -> Option<usize> {
        exact_log(self.d, self.chi)
    }
}

pub(crate) fn exact_log(base: usize, x: usize) -> Option<usize> {
    let mut p = 1usize;
    let mut r = 0;
    while p < x {
        p = p.checked_mul(base)?;
        r += 1;
    }
    (p == x).then_some(r)
}

pub fn ln_dim(d: usize, n: usize) -> f64 {
    n as f64 * (d as f64).ln()
}

/// `ln ∏_{j=0}^{k-1} (D + j)` for `D = e^{ln_d}` without forming `D`.
fn ln_rising_log(ln_d: f64, k: usize) -> f64 {
    let inv = (-ln_d).exp();
    (0..k).map(|j| ln_d + (j as f64 * inv).ln_1p()).sum()
}

/// Haar IPR `D k! / (D(D+1)...(D+k-1))`.
pub fn haar_ipr(d: usize, n: usize, k: usize) -> LogValue {
    haar_ipr_ln_dim(ln_dim(d, n), k)
}

pub fn haar_ipr_ln_dim(ln_d: f64, k: usize) -> LogValue {
    LogValue::from_ln(ln_d + ln_factorial(k) - ln_rising_log(ln_d, k))
}

/// Haar frame potential `1 / binom(D+k-1, k)`.
pub fn haar_fp(d: usize, n: usize, k: usize) -> LogValue {
    let ln_d = ln_dim(d, n);
    LogValue::from_ln(ln_factorial(k) - ln_rising_log(ln_d, k))
}

/// Exact open-boundary RMPS IPR.
///
/// `χ` must be a power of `d` unless `analytic_continuation` is set, in
/// which case `r = log_d χ` is used as a real exponent.
pub fn rmps_ipr_obc(p: &EnsembleParams, analytic_continuation: bool) -> Result<LogValue> {
    if p.boundary != Boundary::Obc || p.geometry != Geometry::Chain {
        return Err(Error::InvalidParams("rmps_ipr_obc needs an open chain".into()));
    }
    let r = match p.exact_r() {
        Some(r) => r as f64,
        None if analytic_continuation => p.r(),
        None => {
            return Err(Error::Domain(format!(
                "chi={} is not a power of d={} (enable analytic continuation)",
                p.chi, p.d
            )))
        }
    };
    let steps = p.n as f64 - r - 1.0;
    if steps < -1e-12 {
        return Err(Error::Domain(format!(
            "chi={} exceeds d^(N-1) for N={}, d={}",
            p.chi, p.n, p.d
        )));
    }
    let steps = steps.max(0.0);
    let (chi, d, k) = (p.chi as f64, p.d as f64, p.k);
    let per_site = ln_rising(chi, k) - ln_rising(d * chi, k);
    let ln = p.ln_dim() + steps * per_site + ln_factorial(k) - ln_rising(d * chi, k);
    Ok(LogValue::from_ln(ln))
}

/// Leading correction `I_Haar (1 + k(k-1)(d-1) / (2dχ))^N`.
pub fn rmps_ipr_leading(p: &EnsembleParams) -> LogValue {
    let (k, d) = (p.k as f64, p.d as f64);
    let c = k * (k - 1.0) / 2.0 * (d - 1.0) / d / p.chi as f64;
    let haar = haar_ipr(p.d, p.n, p.k);
    LogValue::from_ln(haar.ln + p.n as f64 * c.ln_1p())
}

/// Limit of `I / I_Haar` at `χ = Nγ(d-1)/d`, `N → ∞`.
pub fn scaling_ratio(gamma: f64, k: usize) -> f64 {
    let k = k as f64;
    (k * (k - 1.0) / (2.0 * gamma)).exp()
}

/// Periodic-boundary RMPS IPR from the partition expansion
/// `D Σ_λ f_λ² (c_λ(χ)/c_λ(dχ))^N`.
pub fn rmps_ipr_pbc(p: &EnsembleParams) -> Result<LogValue> {
    if p.boundary != Boundary::Pbc || p.geometry != Geometry::Chain {
        return Err(Error::InvalidParams("rmps_ipr_pbc needs a periodic chain".into()));
    }
    let chi = p.chi as f64;
    let q = (p.d * p.chi) as f64;
    let terms: alloc::vec::Vec<f64> = partitions(p.k)
        .iter()
        .filter_map(|lambda| {
            let num = content_polynomial(lambda, chi);
            let den = content_polynomial(lambda, q);
            (num > 0.0 && den > 0.0).then(|| {
                let f = hook_dimension(lambda) as f64;
                2.0 * f.ln() + p.n as f64 * (num.ln() - den.ln())
            })
        })
        .collect();
    Ok(LogValue::from_ln(p.ln_dim() + log_sum_exp(&terms)))
}

/// Random product state IPR `D binom(d+k-1, k)^{-N}`.
pub fn rps_ipr(n: usize, d: usize, k: usize) -> LogValue {
    let ln_binom = ln_rising(d as f64, k) - ln_factorial(k);
    LogValue::from_ln(ln_dim(d, n) - n as f64 * ln_binom)
}

/// Model ratio `F / F_Haar = (1 + a k(k-1) / (2χ²))^N`.
pub fn fp_scaling_model(n: usize, chi: f64, k: usize, a: f64) -> f64 {
    let k = k as f64;
    (n as f64 * (a * k * (k - 1.0) / (2.0 * chi * chi)).ln_1p()).exp()
}

/// Mean and variance of `ln w_i` for a single Haar qudit:
/// `μ = ln d - H_{d-1}`, `σ² = π²/6 - Ψ¹(d)`.
pub fn rps_lognormal_params(d: usize) -> (f64, f64) {
    let harmonic: f64 = (1..d).map(|j| 1.0 / j as f64).sum();
    // Ψ¹(d) = π²/6 - Σ_{j<d} 1/j², so σ² is that partial sum
    let sigma2: f64 = (1..d).map(|j| 1.0 / (j * j) as f64).sum();
    ((d as f64).ln() - harmonic, sigma2)
}

/// `Ψ¹(d)` for integer `d >= 1` via `Ψ¹(d+1) = Ψ¹(d) - 1/d²`.
pub fn trigamma_int(d: usize) -> f64 {
    let mut psi = core::f64::consts::PI * core::f64::consts::PI / 6.0;
    for j in 1..d {
        psi -= 1.0 / (j * j) as f64;
    }
    psi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_log_detects_powers() {
        assert_eq!(exact_log(2, 8), Some(3));
        assert_eq!(exact_log(3, 1), Some(0));
        assert_eq!(exact_log(2, 6), None);
    }

    #[test]
    fn lognormal_sigma_matches_trigamma() {
        for d in 2..8 {
            let (_, s2) = rps_lognormal_params(d);
            let direct = core::f64::consts::PI.powi(2) / 6.0 - trigamma_int(d);
            assert!((s2 - direct).abs() < 1e-14);
        }
    }
}
