//! Small numerical helpers: log-factorials, log-sum-exp and an adaptive
//! Simpson integrator.

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

pub fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

/// `ln (q (q+1) ... (q+k-1))` for `q > 0`.
pub fn ln_rising(q: f64, k: usize) -> f64 {
    (0..k).map(|j| (q + j as f64).ln()).sum()
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Outcome of an adaptive quadrature.
#[derive(Clone, Copy, Debug)]
pub struct Quad {
    pub value: f64,
    /// Sum of local error estimates.
    pub error: f64,
    /// True when some interval hit the depth limit before converging.
    pub exhausted: bool,
}

/// Adaptive Simpson on `[a, b]`, starting from `panels` equal pieces so
/// narrow features are not skipped by the first coarse estimate.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    panels: usize,
    abs_tol: f64,
    max_depth: u32,
) -> Quad {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut out = Quad { value: 0.0, error: 0.0, exhausted: false };
    let tol = abs_tol / panels as f64;
    for i in 0..panels {
        let lo = a + i as f64 * h;
        let hi = if i + 1 == panels { b } else { lo + h };
        let m = 0.5 * (lo + hi);
        let (flo, fm, fhi) = (f(lo), f(m), f(hi));
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
        let q = simpson_rec(&mut f, lo, hi, flo, fm, fhi, whole, tol, max_depth);
        out.value += q.value;
        out.error += q.error;
        out.exhausted |= q.exhausted;
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Quad {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Quad {
            value: left + right + delta / 15.0,
            error: delta.abs() / 15.0,
            exhausted: depth == 0 && delta.abs() > 15.0 * tol,
        };
    }
    let l = simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
    let r = simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    Quad { value: l.value + r.value, error: l.error + r.error, exhausted: l.exhausted || r.exhausted }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}
