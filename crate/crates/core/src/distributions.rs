//! Reference densities for the rescaled overlap `w = D |⟨x|ψ⟩|²`.
//!
//! Every family exposes a density, a CDF and moments obtained by
//! quadrature. Moments are integrated in `s = ln w`, where all families are
//! smooth and the heavy tails of the scaling family stay bounded.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::special::{adaptive_simpson, ln_factorial, normal_cdf};
#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use core::f64::consts::PI;

/// A reference law for `w`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DistributionSpec {
    /// Porter-Thomas; `dim: None` is the `D → ∞` law `e^{-w}`.
    PorterThomas { dim: Option<f64> },
    /// Porter-Thomas convolved with a log-normal factor, parameter `γ`.
    ScalingPt { gamma: f64 },
    /// Exact law for qubit product states on `n` sites.
    RpsExactD2 { n: usize },
    /// Log-normal approximation for product states of `n` qudits.
    RpsLognormal { n: usize, d: usize },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DistributionSpec::PorterThomas { dim: None } => true,
            DistributionSpec::PorterThomas { dim: Some(dim) } => dim > 1.0,
            DistributionSpec::ScalingPt { gamma } => gamma > 0.0 && gamma.is_finite(),
            DistributionSpec::RpsExactD2 { n } => n >= 1,
            DistributionSpec::RpsLognormal { n, d } => n >= 1 && d >= 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(alloc::format!("invalid distribution {self:?}")))
        }
    }

    /// Upper end of the support, `+∞` for unbounded families.
    pub fn support_max(&self) -> f64 {
        match *self {
            DistributionSpec::PorterThomas { dim: Some(dim) } => dim,
            DistributionSpec::RpsExactD2 { n } => libm::pow(2.0, n as f64),
            _ => f64::INFINITY,
        }
    }

    /// Short machine-readable tag.
    pub fn name(&self) -> &'static str {
        match self {
            DistributionSpec::PorterThomas { dim: None } => "pt",
            DistributionSpec::PorterThomas { dim: Some(_) } => "pt_finite",
            DistributionSpec::ScalingPt { .. } => "scaling_pt",
            DistributionSpec::RpsExactD2 { .. } => "rps_exact_d2",
            DistributionSpec::RpsLognormal { .. } => "rps_lognormal",
        }
    }
}

/// Gauss–Hermite nodes and weights for `∫ φ(u) f(u) du`, `φ` the standard
/// normal density.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussHermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermiteRule {
    /// Golub–Welsch construction.
    pub fn new(n: usize) -> Self {
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            let b = (i as f64 / 2.0).sqrt();
            jacobi[(i, i - 1)] = b;
            jacobi[(i - 1, i)] = b;
        }
        let eig = jacobi.symmetric_eigen();
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                // physicists' weight √π v0², rescaled to the unit Gaussian
                (eig.eigenvalues[i] * core::f64::consts::SQRT_2, v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scheme {
    AdaptiveSimpson,
    GaussHermite(GaussHermiteRule),
}

/// Settings for the `u`-integral of the scaling density and the outer
/// moment integrals.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub scheme: Scheme,
    /// Initial window in the Gaussian variable `u`.
    pub window: (f64, f64),
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { scheme: Scheme::AdaptiveSimpson, window: (-12.0, 12.0), rel_tol: 1e-10, max_depth: 40 }
    }
}

impl QuadratureConfig {
    /// Fast path with a fixed Gauss–Hermite rule.
    pub fn gauss_hermite(nodes: usize) -> Self {
        Self { scheme: Scheme::GaussHermite(GaussHermiteRule::new(nodes)), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol >= 1e-13) {
            return Err(Error::InvalidParams("quadrature tolerance must be >= 1e-13".into()));
        }
        if self.window.0 > -12.0 || self.window.1 < 12.0 {
            return Err(Error::InvalidParams("u-window must cover [-12, 12]".into()));
        }
        Ok(())
    }
}

/// Integrates `g(u) φ(u)`-type integrands over the real line with an
/// expanding window. `g` receives `u` and returns the full integrand.
fn integrate_u<F: Fn(f64) -> f64>(f: F, cfg: &QuadratureConfig) -> Result<f64> {
    if let Scheme::GaussHermite(rule) = &cfg.scheme {
        let phi = |u: f64| (-0.5 * u * u).exp() / (2.0 * PI).sqrt();
        return Ok(rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&u, &w)| {
                let p = phi(u);
                if w > 0.0 && p > 0.0 {
                    w * f(u) / p
                } else {
                    0.0
                }
            })
            .sum());
    }
    let (mut lo, mut hi) = cfg.window;
    for _ in 0..32 {
        let peak = (0..=96)
            .map(|i| f(lo + (hi - lo) * i as f64 / 96.0))
            .fold(0.0f64, f64::max);
        let mut grown = false;
        if f(lo) > 1e-14 * peak {
            lo -= 4.0;
            grown = true;
        }
        if f(hi) > 1e-14 * peak {
            hi += 4.0;
            grown = true;
        }
        if !grown {
            break;
        }
    }
    let rough = adaptive_simpson(&f, lo, hi, 96, f64::INFINITY, 0).value.abs();
    if rough == 0.0 {
        return Ok(0.0);
    }
    let q = adaptive_simpson(&f, lo, hi, 96, cfg.rel_tol * rough, cfg.max_depth);
    let achieved = q.error / q.value.abs().max(f64::MIN_POSITIVE);
    if q.exhausted && achieved > cfg.rel_tol {
        return Err(Error::Accuracy { achieved, requested: cfg.rel_tol });
    }
    Ok(q.value)
}

fn scaling_rate(u: f64, gamma: f64) -> f64 {
    (u / gamma.sqrt() + 1.5 / gamma).exp()
}

fn gaussian_weight(u: f64, gamma: f64) -> f64 {
    (-0.5 * u * u + 1.0 / gamma).exp() / (2.0 * PI).sqrt()
}

/// Density at `w`; zero outside the support.
pub fn pdf(spec: &DistributionSpec, w: f64, cfg: &QuadratureConfig) -> Result<f64> {
    spec.validate()?;
    if !(w >= 0.0) || w > spec.support_max() {
        return Ok(0.0);
    }
    Ok(match *spec {
        DistributionSpec::PorterThomas { dim: None } => (-w).exp(),
        DistributionSpec::PorterThomas { dim: Some(dim) } => {
            (dim - 1.0) / dim * (1.0 - w / dim).powf(dim - 2.0)
        }
        DistributionSpec::ScalingPt { gamma } => integrate_u(
            |u| gaussian_weight(u, gamma) * (-w * scaling_rate(u, gamma)).exp(),
            cfg,
        )?,
        DistributionSpec::RpsExactD2 { n } => {
            let ln_d = n as f64 * core::f64::consts::LN_2;
            let t = ln_d - w.ln();
            if w == 0.0 || t <= 0.0 {
                0.0
            } else {
                ((n as f64 - 1.0) * t.ln() - ln_d - ln_factorial(n - 1)).exp()
            }
        }
        DistributionSpec::RpsLognormal { n, d } => {
            if w == 0.0 {
                return Ok(0.0);
            }
            let (m, v) = lognormal_moments(n, d);
            let z = w.ln() - m;
            (-z * z / (2.0 * v)).exp() / (w * (2.0 * PI * v).sqrt())
        }
    })
}

fn lognormal_moments(n: usize, d: usize) -> (f64, f64) {
    let (mu, s2) = crate::closed_form::rps_lognormal_params(d);
    (n as f64 * mu, n as f64 * s2)
}

/// `P(W <= w)`.
pub fn cdf(spec: &DistributionSpec, w: f64, cfg: &QuadratureConfig) -> Result<f64> {
    spec.validate()?;
    if !(w > 0.0) {
        return Ok(0.0);
    }
    if w >= spec.support_max() {
        return Ok(1.0);
    }
    Ok(match *spec {
        DistributionSpec::PorterThomas { dim: None } => -(-w).exp_m1(),
        DistributionSpec::PorterThomas { dim: Some(dim) } => {
            -((dim - 1.0) * (-w / dim).ln_1p()).exp_m1()
        }
        DistributionSpec::ScalingPt { gamma } => {
            let v = integrate_u(
                |u| {
                    let a = scaling_rate(u, gamma);
                    gaussian_weight(u, gamma) * -(-w * a).exp_m1() / a
                },
                cfg,
            )?;
            v.clamp(0.0, 1.0)
        }
        DistributionSpec::RpsExactD2 { n } => {
            // ln(D/w) is Gamma(n, 1) distributed
            let x = n as f64 * core::f64::consts::LN_2 - w.ln();
            let mut term = (-x).exp();
            let mut sum = term;
            for j in 1..n {
                term *= x / j as f64;
                sum += term;
            }
            sum.min(1.0)
        }
        DistributionSpec::RpsLognormal { n, d } => {
            let (m, v) = lognormal_moments(n, d);
            normal_cdf((w.ln() - m) / v.sqrt())
        }
    })
}

/// Range of `s = ln w` outside of which the tilted integrand
/// `w^{k+1} pdf(w)` is negligible.
fn log_range(spec: &DistributionSpec, k: usize) -> (f64, f64) {
    match *spec {
        DistributionSpec::PorterThomas { dim } => {
            let hi = (k as f64 + 80.0).ln();
            (-45.0, dim.map_or(hi, |d| d.ln().min(hi)))
        }
        DistributionSpec::ScalingPt { gamma } => {
            // log-normal part of ln w has variance 1/γ around -1/(2γ),
            // tilted by k/γ
            let sd = (1.0 / gamma).sqrt();
            let centre = (k as f64 + 0.5) / gamma;
            (-45.0, centre + 40.0 * sd + (k as f64 + 80.0).ln())
        }
        DistributionSpec::RpsExactD2 { n } => {
            let ln_d = n as f64 * core::f64::consts::LN_2;
            let t_max = n as f64 + 60.0 + 12.0 * (n as f64).sqrt();
            (ln_d - t_max, ln_d)
        }
        DistributionSpec::RpsLognormal { n, d } => {
            let (m, v) = lognormal_moments(n, d);
            let centre = m + k as f64 * v;
            (centre - 40.0 * v.sqrt(), centre + 40.0 * v.sqrt())
        }
    }
}

/// Result of [`moment`]: the quadrature value and, where one exists, the
/// analytic value it should reproduce.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentValue {
    pub quadrature: f64,
    pub reference: Option<f64>,
}

/// Analytic `E[w^k]`.
pub fn moment_reference(spec: &DistributionSpec, k: usize) -> Option<f64> {
    let kf = k as f64;
    Some(match *spec {
        DistributionSpec::PorterThomas { dim: None } => ln_factorial(k).exp(),
        DistributionSpec::PorterThomas { dim: Some(dim) } => {
            // D^k k! / (D (D+1) ... (D+k-1))
            (0..k).map(|j| dim / (dim + j as f64) * (j + 1) as f64).product()
        }
        DistributionSpec::ScalingPt { gamma } => {
            (ln_factorial(k) + kf * (kf - 1.0) / (2.0 * gamma)).exp()
        }
        DistributionSpec::RpsExactD2 { n } => {
            (n as f64 * (kf * core::f64::consts::LN_2 - (kf + 1.0).ln())).exp()
        }
        DistributionSpec::RpsLognormal { n, d } => {
            let (m, v) = lognormal_moments(n, d);
            (kf * m + kf * kf * v / 2.0).exp()
        }
    })
}

/// `∫ w^k pdf(w) dw` by quadrature in `s = ln w`. `k = 0` gives the
/// normalization.
pub fn moment(spec: &DistributionSpec, k: usize, cfg: &QuadratureConfig) -> Result<MomentValue> {
    spec.validate()?;
    cfg.validate()?;
    let (lo, hi) = log_range(spec, k);
    let mut failure = None;
    let mut g = |s: f64| {
        let w = s.exp();
        match pdf(spec, w, cfg) {
            Ok(p) => ((k + 1) as f64 * s).exp() * p,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let rough = adaptive_simpson(&mut g, lo, hi, 128, f64::INFINITY, 0).value.abs();
    let q = adaptive_simpson(&mut g, lo, hi, 128, cfg.rel_tol * rough, cfg.max_depth);
    if let Some(e) = failure {
        return Err(e);
    }
    let achieved = q.error / q.value.abs().max(f64::MIN_POSITIVE);
    if q.exhausted && achieved > cfg.rel_tol.max(1e-9) {
        return Err(Error::Accuracy { achieved, requested: cfg.rel_tol });
    }
    Ok(MomentValue { quadrature: q.value, reference: moment_reference(spec, k) })
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| if n == 1 { lo } else { (a + (b - a) * i as f64 / (n - 1) as f64).exp() })
        .collect()
}

/// `(w, pdf(w))` pairs on a grid.
pub fn density_curve(
    spec: &DistributionSpec,
    grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<(f64, f64)>> {
    grid.iter().map(|&w| Ok((w, pdf(spec, w, cfg)?))).collect()
}

/// CDF tabulated on a log grid, interpolated linearly in `ln w`.
#[derive(Clone, Debug)]
pub struct CdfTable {
    ln_w: Vec<f64>,
    values: Vec<f64>,
}

impl CdfTable {
    pub const POINTS: usize = 2048;
    pub const W_MIN: f64 = 1e-6;

    pub fn new(spec: &DistributionSpec, cfg: &QuadratureConfig) -> Result<Self> {
        spec.validate()?;
        let mut w_max = spec.support_max();
        if !w_max.is_finite() {
            w_max = 10.0;
            while w_max < 1e15 && 1.0 - cdf(spec, w_max, cfg)? > 1e-12 {
                w_max *= 4.0;
            }
        }
        let grid = log_grid(Self::W_MIN, w_max, Self::POINTS);
        let values = grid.iter().map(|&w| cdf(spec, w, cfg)).collect::<Result<Vec<_>>>()?;
        Ok(Self { ln_w: grid.iter().map(|w| w.ln()).collect(), values })
    }

    pub fn eval(&self, w: f64) -> f64 {
        if !(w > 0.0) {
            return 0.0;
        }
        let x = w.ln();
        let n = self.ln_w.len();
        if x <= self.ln_w[0] {
            // the density is finite at 0, so the CDF is linear there
            return self.values[0] * w / Self::W_MIN;
        }
        if x >= self.ln_w[n - 1] {
            return 1.0;
        }
        let step = (self.ln_w[n - 1] - self.ln_w[0]) / (n - 1) as f64;
        let i = (((x - self.ln_w[0]) / step) as usize).min(n - 2);
        let t = (x - self.ln_w[i]) / (self.ln_w[i + 1] - self.ln_w[i]);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }
}

/// Kolmogorov–Smirnov distance between an empirical sample and a CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// KS distance between samples of `w` and a reference family.
pub fn ks_distance(samples: &[f64], spec: &DistributionSpec, cfg: &QuadratureConfig) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if samples.len() < 100 {
        return Err(Error::InvalidParams("KS distance needs at least 100 samples".into()));
    }
    match spec {
        DistributionSpec::ScalingPt { .. } => {
            let table = CdfTable::new(spec, cfg)?;
            ks_statistic(samples, |w| table.eval(w))
        }
        _ => {
            spec.validate()?;
            ks_statistic(samples, |w| cdf(spec, w, cfg).unwrap_or(f64::NAN))
        }
    }
}

/// Sup-distance between two CDFs, scanned on a dense grid in `ln w`.
pub fn ks_between(
    a: &DistributionSpec,
    b: &DistributionSpec,
    points: usize,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let (lo_a, hi_a) = log_range(a, 0);
    let (lo_b, hi_b) = log_range(b, 0);
    let (lo, hi) = (lo_a.min(lo_b), hi_a.max(hi_b));
    let mut best = 0.0f64;
    for i in 0..points {
        let w = (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp();
        best = best.max((cdf(a, w, cfg)? - cdf(b, w, cfg)?).abs());
    }
    Ok(best)
}
