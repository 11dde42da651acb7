//! Exact contraction of replica-averaged networks.
//!
//! After averaging, every Haar isometry becomes a map between coefficient
//! vectors over `S_k`. For a site with input dimension `a` and unitary size
//! `q` the map is one of:
//!
//! * `a = 1`: the output is a Haar state, coefficients `1/(q)_k`;
//! * `a = q` with a single input register: `U^{⊗k}` commutes with every
//!   permutation operator, so coefficients pass through unchanged;
//! * otherwise `W(q) G(a)`, which needs `q ≥ k`.
//!
//! The physical leg projected on `|0⟩` contributes a factor 1 for every
//! permutation, so IPR networks only carry bond indices. Frame potentials
//! carry two rails coupled at each physical leg by `d^{#(σσ')}`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::closed_form::{haar_fp, haar_ipr, Boundary, EnsembleParams, Geometry, LogValue};
use crate::error::{Error, Result};
use crate::layout::{chain_layout, LatticeLayout};
use crate::network::zipper_step;
use crate::replica_algebra::SymGroup;
use crate::sampler::Quantity;
use crate::special::ln_rising;
#[cfg(not(feature = "std"))]
use num_traits::Float as _;

/// Limits for dense contraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContractionConfig {
    pub mem_budget_bytes: u128,
    /// Allow two-rail operators at `k >= 5`.
    pub allow_large_fp: bool,
}

impl Default for ContractionConfig {
    fn default() -> Self {
        Self { mem_budget_bytes: 2 << 30, allow_large_fp: false }
    }
}

impl ContractionConfig {
    pub fn with_budget_mb(mb: u64) -> Self {
        Self { mem_budget_bytes: u128::from(mb) << 20, ..Self::default() }
    }

    fn check(&self, required_bytes: u128) -> Result<()> {
        if required_bytes > self.mem_budget_bytes {
            Err(Error::Budget { required_bytes, limit_bytes: self.mem_budget_bytes })
        } else {
            Ok(())
        }
    }
}

/// Memory a contraction of `p` would need, as checked against
/// [`ContractionConfig::mem_budget_bytes`].
pub fn required_bytes(p: &EnsembleParams, quantity: Quantity) -> u128 {
    let n = crate::replica_algebra::factorial(p.k.min(crate::replica_algebra::K_MAX)) as u128;
    match (p.geometry, quantity) {
        (Geometry::Chain, Quantity::Ipr) => n * n * 8 * 3,
        (Geometry::Chain, Quantity::FramePotential) => n * n * 8 * 4,
        (Geometry::Square(l), _) => n.saturating_pow(l as u32 + 1).saturating_mul(8 * 3),
    }
}

/// Budget check without contracting; `Err(Budget)` exactly when the
/// contraction itself would refuse for lack of memory.
pub fn check_budget(p: &EnsembleParams, quantity: Quantity, cfg: &ContractionConfig) -> Result<()> {
    let bytes = required_bytes(p, quantity);
    match (p.geometry, quantity) {
        (Geometry::Chain, Quantity::FramePotential) => check_fp_size(p.k, cfg, bytes),
        (Geometry::Square(_), Quantity::FramePotential) => {
            Err(Error::InvalidParams("frame potentials are contracted on chains only".into()))
        }
        _ => cfg.check(bytes),
    }
}

/// A dense replica transfer operator over `(k!)^rails` indices.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferOperator {
    pub rails: usize,
    pub d: usize,
    pub chi: usize,
    pub k: usize,
    pub matrix: DMatrix<f64>,
}

/// Single-site map between coefficient vectors, see the module docs.
enum SiteMap {
    State(f64),
    Identity,
    Dense(DMatrix<f64>),
}

impl SiteMap {
    fn new(sym: &SymGroup, input: u64, q: u64) -> Result<Self> {
        if input == 1 {
            Ok(SiteMap::State((-ln_rising(q as f64, sym.k())).exp()))
        } else if input == q {
            Ok(SiteMap::Identity)
        } else {
            let w = sym.weingarten(q)?;
            Ok(SiteMap::Dense(&w.entries * &sym.gram(input).entries))
        }
    }

    fn matrix(&self, n: usize) -> DMatrix<f64> {
        match self {
            SiteMap::State(c) => DMatrix::from_element(n, n, *c),
            SiteMap::Identity => DMatrix::identity(n, n),
            SiteMap::Dense(m) => m.clone(),
        }
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        match self {
            SiteMap::State(c) => vec![c * v.iter().sum::<f64>(); v.len()],
            SiteMap::Identity => v.to_vec(),
            SiteMap::Dense(m) => (m * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec(),
        }
    }
}

fn renormalize(v: &mut [f64]) -> f64 {
    let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if m > 0.0 {
        v.iter_mut().for_each(|x| *x /= m);
        m.ln()
    } else {
        0.0
    }
}

fn positive_log(total: f64, ln_scale: f64, what: &str) -> Result<LogValue> {
    if total > 0.0 && total.is_finite() {
        Ok(LogValue::from_ln(total.ln() + ln_scale))
    } else {
        Err(Error::Domain(format!("{what} contracted to a non-positive value {total}")))
    }
}

/// `𝒯 = W(dχ) G(χ)`.
pub fn ipr_transfer(d: usize, chi: usize, k: usize) -> Result<TransferOperator> {
    let sym = SymGroup::new(k)?;
    let q = (d * chi) as u64;
    let w = sym.weingarten(q)?;
    let matrix = &w.entries * &sym.gram(chi as u64).entries;
    Ok(TransferOperator { rails: 1, d, chi, k, matrix })
}

fn require_chain(p: &EnsembleParams, boundary: Boundary) -> Result<()> {
    if p.geometry != Geometry::Chain || p.boundary != boundary {
        return Err(Error::InvalidParams(format!(
            "expected a {boundary:?} chain, got {:?} {:?}",
            p.boundary, p.geometry
        )));
    }
    Ok(())
}

/// IPR of the open chain by a left-to-right sweep over its true site
/// sizes.
pub fn ipr_obc_contract(p: &EnsembleParams) -> Result<LogValue> {
    let p = p.validated()?;
    require_chain(&p, Boundary::Obc)?;
    let bonds = chain_layout(p.n, p.d, p.chi)?;
    let sym = SymGroup::new(p.k)?;
    let n = sym.order();
    let mut v = vec![0.0; n];
    v[0] = 1.0;
    let mut ln_scale = 0.0;
    for i in 0..p.n {
        let q = (p.d * bonds[i + 1]) as u64;
        v = SiteMap::new(&sym, bonds[i] as u64, q)?.apply(&v);
        ln_scale += renormalize(&mut v);
    }
    positive_log(v.iter().sum(), ln_scale + p.ln_dim(), "open-chain IPR")
}

/// `D Tr(𝒯^N)` for the periodic chain.
pub fn ipr_pbc_contract(p: &EnsembleParams) -> Result<LogValue> {
    let p = p.validated()?;
    require_chain(&p, Boundary::Pbc)?;
    let t = ipr_transfer(p.d, p.chi, p.k)?.matrix;
    let n = t.nrows();
    let mut m = DMatrix::<f64>::identity(n, n);
    let mut ln_scale = 0.0;
    // square-and-multiply keeps the cost logarithmic in N
    let mut base = t;
    let mut base_scale = 0.0;
    let mut e = p.n;
    while e > 0 {
        if e & 1 == 1 {
            m = &m * &base;
            ln_scale += base_scale;
            ln_scale += renormalize(m.as_mut_slice());
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
            base_scale *= 2.0;
            base_scale += renormalize(base.as_mut_slice());
        }
    }
    positive_log(m.trace(), ln_scale + p.ln_dim(), "periodic-chain IPR")
}

fn check_fp_size(k: usize, cfg: &ContractionConfig, rails_bytes: u128) -> Result<()> {
    if k >= 5 && !cfg.allow_large_fp {
        return Err(Error::Budget { required_bytes: rails_bytes, limit_bytes: cfg.mem_budget_bytes });
    }
    cfg.check(rails_bytes)
}

/// Dense two-rail bulk operator
/// `𝒯_F[(σ,σ'),(τ,τ')] = d^{#(σσ')} M_{στ} M_{σ'τ'}` with `M = W(dχ) G(χ)`.
pub fn fp_transfer(d: usize, chi: usize, k: usize, cfg: &ContractionConfig) -> Result<TransferOperator> {
    let n = crate::replica_algebra::factorial(k) as u128;
    check_fp_size(k, cfg, n.pow(4) * 8)?;
    let sym = SymGroup::new(k)?;
    let m = ipr_transfer(d, chi, k)?.matrix;
    let c = sym.layer_coupling(d as u64);
    let n = n as usize;
    let matrix = DMatrix::from_fn(n * n, n * n, |row, col| {
        let (s, s2) = (row / n, row % n);
        let (t, t2) = (col / n, col % n);
        c[(s, s2)] * m[(s, t)] * m[(s2, t2)]
    });
    Ok(TransferOperator { rails: 2, d, chi, k, matrix })
}

/// Frame potential of the open chain, two rails swept left to right.
pub fn fp_contract(p: &EnsembleParams, cfg: &ContractionConfig) -> Result<LogValue> {
    let p = p.validated()?;
    require_chain(&p, Boundary::Obc)?;
    let n = crate::replica_algebra::factorial(p.k) as u128;
    check_fp_size(p.k, cfg, n * n * 8 * 4)?;
    let bonds = chain_layout(p.n, p.d, p.chi)?;
    let sym = SymGroup::new(p.k)?;
    let n = sym.order();
    let c = sym.layer_coupling(p.d as u64);
    let mut v = DMatrix::<f64>::zeros(n, n);
    v[(0, 0)] = 1.0;
    let mut ln_scale = 0.0;
    for i in 0..p.n {
        let q = (p.d * bonds[i + 1]) as u64;
        let m = SiteMap::new(&sym, bonds[i] as u64, q)?.matrix(n);
        v = (&m * &v * m.transpose()).component_mul(&c);
        ln_scale += renormalize(v.as_mut_slice());
    }
    positive_log(v.sum(), ln_scale, "frame potential")
}

/// `F / F_Haar - 1`.
pub fn fp_delta(p: &EnsembleParams, cfg: &ContractionConfig) -> Result<f64> {
    Ok(fp_contract(p, cfg)?.delta_vs(haar_fp(p.d, p.n, p.k)))
}

/// `I / I_Haar - 1` for the open chain contraction.
pub fn ipr_delta(p: &EnsembleParams) -> Result<f64> {
    Ok(ipr_obc_contract(p)?.delta_vs(haar_ipr(p.d, p.n, p.k)))
}

/// IPR of the `L x L` isometric PEPS.
pub fn peps_ipr(l: usize, d: usize, chi: usize, k: usize, cfg: &ContractionConfig) -> Result<LogValue> {
    lattice_ipr(l, l, d, chi, k, cfg)
}

/// IPR of a `rows x cols` isometric network.
///
/// Site factor `B(σ; τ_L, τ_D) = Σ_π Wg_{σπ}(q) G_{πτ_L}(χ_L) G_{πτ_D}(χ_D)`,
/// with `σ` copied onto the right and up legs. Lattice-edge legs carry a
/// single trivial index.
pub fn lattice_ipr(
    rows: usize,
    cols: usize,
    d: usize,
    chi: usize,
    k: usize,
    cfg: &ContractionConfig,
) -> Result<LogValue> {
    let layout = LatticeLayout::new(rows, cols, d, chi)?;
    let sym = SymGroup::new(k)?;
    let n = sym.order();
    let entries = (n as u128).saturating_pow(cols as u32 + 1);
    cfg.check(entries.saturating_mul(8 * 3))?;
    let dim = |exists: bool| if exists { n } else { 1 };

    let mut boundary = vec![1.0f64];
    let mut ln_scale = 0.0;
    for r in 0..rows {
        let downs = vec![dim(layout.has_down(r)); cols];
        let mut prefix = 1;
        for c in 0..cols {
            let s = layout.site(r, c);
            let (hl, hd) = (layout.has_left(c), layout.has_down(r));
            let (hu, hr) = (layout.has_up(r), layout.has_right(c));
            let (li, di, uo, ro) = (dim(hl), dim(hd), dim(hu), dim(hr));
            let q = (d * s.right * s.up) as u64;
            // b[(σ, τ_L, τ_D)], σ the output permutation
            let block = site_block(&sym, s.left as u64, s.down as u64, hl, hd, q)?;
            let mut mat = vec![0.0; li * di * uo * ro];
            for tl in 0..li {
                for td in 0..di {
                    for sigma in 0..n {
                        let col = (if hu { sigma } else { 0 }) * ro + if hr { sigma } else { 0 };
                        mat[(tl * di + td) * uo * ro + col] += block[(sigma * li + tl) * di + td];
                    }
                }
            }
            let suffix: usize = downs[c + 1..].iter().product();
            boundary = zipper_step(&boundary, prefix, li, di, suffix, &mat, uo, ro);
            prefix *= uo;
            ln_scale += renormalize(&mut boundary);
        }
    }
    let ln_d = (rows * cols) as f64 * (d as f64).ln();
    positive_log(boundary.iter().sum(), ln_scale + ln_d, "lattice IPR")
}

/// Site coefficients `b[(σ, τ_L, τ_D)]`; absent legs have a single index.
fn site_block(
    sym: &SymGroup,
    left: u64,
    down: u64,
    has_left: bool,
    has_down: bool,
    q: u64,
) -> Result<Vec<f64>> {
    let n = sym.order();
    let li = if has_left { n } else { 1 };
    let di = if has_down { n } else { 1 };
    let mut out = vec![0.0; n * li * di];
    let input = left * down;
    if input == 1 {
        let c = (-ln_rising(q as f64, sym.k())).exp();
        out.iter_mut().for_each(|x| *x = c);
        return Ok(out);
    }
    if input == q && (left == 1 || down == 1) {
        // one register carries everything; the other leg is summed over
        for sigma in 0..n {
            for tl in 0..li {
                for td in 0..di {
                    let t = if left == 1 { td } else { tl };
                    out[(sigma * li + tl) * di + td] = if t == sigma { 1.0 } else { 0.0 };
                }
            }
        }
        return Ok(out);
    }
    let w = sym.weingarten(q)?.entries;
    let gl = sym.gram(left).entries;
    let gd = sym.gram(down).entries;
    for sigma in 0..n {
        for tl in 0..li {
            for td in 0..di {
                let mut acc = 0.0;
                for pi in 0..n {
                    let a = if has_left { gl[(pi, tl)] } else { 1.0 };
                    let b = if has_down { gd[(pi, td)] } else { 1.0 };
                    acc += w[(sigma, pi)] * a * b;
                }
                out[(sigma * li + tl) * di + td] = acc;
            }
        }
    }
    Ok(out)
}

/// One `(N, χ, k, Δ𝓕)` observation for [`fit_fp_constant`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FpPoint {
    pub n: usize,
    pub chi: usize,
    pub k: usize,
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub a: f64,
    /// Largest `|model - data| / data` over `ln(1+Δ)/N`.
    pub max_rel_residual: f64,
    pub points_used: usize,
}

/// Least squares for `a` in `ln(1+Δ)/N ≈ ln(1 + a k(k-1)/(2χ²))`.
/// Rows with `k = 1` carry no information and are dropped.
pub fn fit_fp_constant(grid: &[FpPoint]) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .filter(|p| p.k >= 2)
        .map(|p| {
            let c = (p.k * (p.k - 1)) as f64 / (2.0 * (p.chi * p.chi) as f64);
            (c, p.delta.ln_1p() / p.n as f64)
        })
        .collect();
    let distinct = |f: &dyn Fn(&FpPoint) -> usize| {
        let mut v: Vec<usize> = grid.iter().filter(|p| p.k >= 2).map(f).collect();
        v.sort_unstable();
        v.dedup();
        v.len()
    };
    if pts.len() < 6 || distinct(&|p| p.chi) < 2 || distinct(&|p| p.n) < 2 {
        return Err(Error::InvalidParams(
            "fit needs >= 6 points over >= 2 values of chi and of N".into(),
        ));
    }
    let mut guesses: Vec<f64> = pts.iter().map(|&(c, y)| y.exp_m1() / c).collect();
    guesses.sort_by(f64::total_cmp);
    let mut a = guesses[guesses.len() / 2];
    for _ in 0..100 {
        let (mut num, mut den) = (0.0, 0.0);
        for &(c, y) in &pts {
            let g = (a * c).ln_1p();
            let dg = c / (1.0 + a * c);
            num += (y - g) * dg;
            den += dg * dg;
        }
        let step = num / den;
        a += step;
        if step.abs() <= 1e-15 * a.abs() {
            break;
        }
    }
    let max_rel_residual = pts
        .iter()
        .map(|&(c, y)| ((a * c).ln_1p() - y).abs() / y.abs())
        .fold(0.0, f64::max);
    Ok(FitResult { a, max_rel_residual, points_used: pts.len() })
}
