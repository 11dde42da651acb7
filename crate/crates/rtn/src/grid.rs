//! Parameter-list syntax shared by all grid flags.
//!
//! A list is comma separated. Each item is a number, an inclusive range
//! `a..b`, or a geometric range `a..b*m` (`2..2048*2` gives the powers of
//! two up to 2048).

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridError(pub String);

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for GridError {}

fn bad(item: &str, why: &str) -> GridError {
    GridError(format!("bad grid item `{item}`: {why}"))
}

fn parse_one(item: &str) -> Result<usize, GridError> {
    item.trim().parse().map_err(|_| bad(item, "not a non-negative integer"))
}

/// Expands an integer list.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, GridError> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let Some((a, rest)) = item.split_once("..") else {
            out.push(parse_one(item)?);
            continue;
        };
        let (b, mult) = match rest.split_once('*') {
            Some((b, m)) => (b, Some(parse_one(m)?)),
            None => (rest, None),
        };
        let (a, b) = (parse_one(a)?, parse_one(b)?);
        if a > b {
            return Err(bad(item, "range is empty"));
        }
        match mult {
            None => out.extend(a..=b),
            Some(m) if m < 2 || a == 0 => return Err(bad(item, "geometric range needs a >= 1 and m >= 2")),
            Some(m) => {
                let mut x = a;
                while x <= b {
                    out.push(x);
                    x = match x.checked_mul(m) {
                        Some(y) => y,
                        None => break,
                    };
                }
            }
        }
        if out.len() > 1_000_000 {
            return Err(bad(item, "grid too large"));
        }
    }
    if out.is_empty() {
        return Err(GridError("grid is empty".into()));
    }
    Ok(out)
}

/// Expands a list of reals; ranges are not accepted.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, GridError> {
    let out = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| bad(t, "not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    if out.is_empty() {
        return Err(GridError("grid is empty".into()));
    }
    Ok(out)
}
