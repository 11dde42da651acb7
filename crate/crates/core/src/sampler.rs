//! Monte Carlo over sampled tensor-network states.
//!
//! Every sample `i` draws from its own ChaCha stream `(seed, i)`, so
//! results do not depend on evaluation order or thread count.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::closed_form::{Boundary, EnsembleParams, Geometry};
use crate::error::{Error, Result};
use crate::layout::{chain_layout, LatticeLayout};
use crate::network::zipper_step;
#[cfg(not(feature = "std"))]
use num_traits::Float as _;

pub type C64 = Complex64;

/// Independent generator for sample `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

/// First `cols` columns of a Haar unitary of size `rows`.
///
/// QR of a complex Gaussian matrix, with each column of `Q` multiplied by
/// the phase of the matching diagonal entry of `R`. Without that phase
/// correction the result is not Haar distributed.
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    assert!(cols <= rows && cols > 0, "isometry {cols} -> {rows} impossible");
    let qr = ginibre(rows, cols, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..cols {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        let phase = if n > 0.0 { rjj / n } else { C64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    q
}

pub fn haar_unitary<R: Rng + ?Sized>(q: usize, rng: &mut R) -> DMatrix<C64> {
    haar_isometry(q, q, rng)
}

/// A complex number stored as `phase · e^{ln_abs}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplitude {
    pub ln_abs: f64,
    pub phase: C64,
}

impl Amplitude {
    fn from_parts(ln_scale: f64, z: C64) -> Self {
        let n = z.norm();
        if n == 0.0 {
            Self { ln_abs: f64::NEG_INFINITY, phase: C64::new(1.0, 0.0) }
        } else {
            Self { ln_abs: ln_scale + n.ln(), phase: z / n }
        }
    }

    pub fn value(&self) -> C64 {
        self.phase * self.ln_abs.exp()
    }

    /// `ln |z|²`.
    pub fn ln_abs2(&self) -> f64 {
        2.0 * self.ln_abs
    }
}

/// A matrix product state; `sites[i][x]` is the `left x right` matrix of
/// site `i` at physical value `x`.
#[derive(Clone, Debug)]
pub struct MpsState {
    pub d: usize,
    pub boundary: Boundary,
    pub sites: Vec<Vec<DMatrix<C64>>>,
    pub seed: Option<u64>,
    /// False for periodic states, whose norm is random.
    pub normalized: bool,
}

impl MpsState {
    pub fn n(&self) -> usize {
        self.sites.len()
    }

    /// `[left bond of site 0, right bond of each site]`.
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut b = vec![self.sites[0][0].nrows()];
        b.extend(self.sites.iter().map(|s| s[0].ncols()));
        b
    }

    /// Product state from one `d`-vector per site.
    pub fn product(vectors: &[Vec<C64>]) -> Result<Self> {
        let d = vectors.first().map(Vec::len).ok_or(Error::EmptyInput)?;
        if vectors.iter().any(|v| v.len() != d) {
            return Err(Error::InvalidParams("product state vectors differ in length".into()));
        }
        let sites = vectors
            .iter()
            .map(|v| v.iter().map(|&a| DMatrix::from_element(1, 1, a)).collect())
            .collect();
        Ok(Self { d, boundary: Boundary::Obc, sites, seed: None, normalized: true })
    }

    /// `⟨x|ψ⟩` by left-to-right matrix products; periodic states take the
    /// trace at the end.
    pub fn amplitude(&self, x: &[usize]) -> Result<Amplitude> {
        if x.len() != self.n() || x.iter().any(|&xi| xi >= self.d) {
            return Err(Error::InvalidParams(format!("basis string {x:?} does not fit the state")));
        }
        let chi0 = self.sites[0][0].nrows();
        let mut m = DMatrix::<C64>::identity(chi0, chi0);
        let mut ln_scale = 0.0;
        for (site, &xi) in self.sites.iter().zip(x) {
            m = &m * &site[xi];
            let s = m.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
            if s == 0.0 {
                return Ok(Amplitude::from_parts(0.0, C64::new(0.0, 0.0)));
            }
            m.iter_mut().for_each(|z| *z /= s);
            ln_scale += s.ln();
        }
        Ok(Amplitude::from_parts(ln_scale, m.trace()))
    }

    pub fn amplitude_zero(&self) -> Result<Amplitude> {
        self.amplitude(&vec![0; self.n()])
    }

    /// Full state vector, first site most significant. Limited to small
    /// systems.
    pub fn to_dense(&self) -> Result<Vec<C64>> {
        let n = self.n();
        if n > 12 {
            return Err(Error::InvalidParams(format!("dense state limited to 12 sites, got {n}")));
        }
        let chi0 = self.sites[0][0].nrows();
        // rows (alpha_0, prefix), columns: current bond
        let mut cur = DMatrix::<C64>::identity(chi0, chi0);
        let mut prefix = 1usize;
        for site in &self.sites {
            let right = site[0].ncols();
            let mut next = DMatrix::<C64>::zeros(chi0 * prefix * self.d, right);
            for a0 in 0..chi0 {
                for p in 0..prefix {
                    let row = cur.row(a0 * prefix + p);
                    for (x, a) in site.iter().enumerate() {
                        let v = row * a;
                        next.row_mut((a0 * prefix + p) * self.d + x).copy_from(&v);
                    }
                }
            }
            cur = next;
            prefix *= self.d;
        }
        Ok((0..prefix)
            .map(|p| (0..chi0).map(|a0| cur[(a0 * prefix + p, a0)]).sum())
            .collect())
    }
}

/// Builds one random MPS.
///
/// Open chains follow [`chain_layout`]: a Haar state on `d ⊗ χ_1`, then
/// Haar isometries `χ_{i-1} → d ⊗ χ_i`, then a left-to-right QR sweep
/// that trims the left-edge bonds to their rank `min(d^i, χ)`. Periodic
/// chains use `χ → d ⊗ χ` isometries everywhere and are not normalized.
pub fn sample_rmps<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    chi: usize,
    boundary: Boundary,
    rng: &mut R,
) -> Result<MpsState> {
    if n == 0 || d < 2 || chi == 0 {
        return Err(Error::InvalidParams(format!("bad RMPS N={n}, d={d}, chi={chi}")));
    }
    let bonds = match boundary {
        Boundary::Obc => chain_layout(n, d, chi)?,
        Boundary::Pbc => vec![chi; n + 1],
    };
    let mut sites = Vec::with_capacity(n);
    for i in 0..n {
        let (left, right) = (bonds[i], bonds[i + 1]);
        let v = haar_isometry(d * right, left, rng);
        let site: Vec<DMatrix<C64>> = (0..d)
            .map(|x| DMatrix::from_fn(left, right, |a, b| v[(x * right + b, a)]))
            .collect();
        sites.push(site);
    }
    let mut state = MpsState { d, boundary, sites, seed: None, normalized: boundary == Boundary::Obc };
    if boundary == Boundary::Obc {
        left_compress(&mut state);
    }
    Ok(state)
}

/// QR sweep that removes rank-deficient bond directions without changing
/// the state.
fn left_compress(state: &mut MpsState) {
    let d = state.d;
    for i in 0..state.n() - 1 {
        let (left, right) = (state.sites[i][0].nrows(), state.sites[i][0].ncols());
        if left * d >= right {
            continue;
        }
        // rows (x, a), columns b
        let m = DMatrix::from_fn(left * d, right, |row, b| state.sites[i][row / left][(row % left, b)]);
        let qr = m.qr();
        let (q, r) = (qr.q(), qr.r());
        let rank = q.ncols();
        state.sites[i] =
            (0..d).map(|x| DMatrix::from_fn(left, rank, |a, b| q[(x * left + a, b)])).collect();
        for a in state.sites[i + 1].iter_mut() {
            *a = &r * &*a;
        }
    }
}

/// `⟨a|b⟩` for two open-boundary states.
pub fn overlap(a: &MpsState, b: &MpsState) -> Result<Amplitude> {
    if a.n() != b.n() || a.d != b.d {
        return Err(Error::InvalidParams("overlap of states with different shapes".into()));
    }
    if a.boundary != Boundary::Obc || b.boundary != Boundary::Obc {
        return Err(Error::InvalidParams("overlap is implemented for open chains".into()));
    }
    let mut e = DMatrix::<C64>::from_element(1, 1, C64::new(1.0, 0.0));
    let mut ln_scale = 0.0;
    for (sa, sb) in a.sites.iter().zip(&b.sites) {
        let mut next = DMatrix::<C64>::zeros(sa[0].ncols(), sb[0].ncols());
        for (ma, mb) in sa.iter().zip(sb) {
            next += ma.adjoint() * &e * mb;
        }
        let s = next.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if s == 0.0 {
            return Ok(Amplitude::from_parts(0.0, C64::new(0.0, 0.0)));
        }
        next.iter_mut().for_each(|z| *z /= s);
        ln_scale += s.ln();
        e = next;
    }
    Ok(Amplitude::from_parts(ln_scale, e[(0, 0)]))
}

/// One tensor of a lattice state, indexed `[x][left][right][up][down]`.
#[derive(Clone, Debug)]
pub struct PepsSite {
    pub left: usize,
    pub right: usize,
    pub up: usize,
    pub down: usize,
    pub data: Vec<C64>,
}

impl PepsSite {
    fn at(&self, x: usize, l: usize, r: usize, u: usize, dn: usize) -> C64 {
        self.data[(((x * self.left + l) * self.right + r) * self.up + u) * self.down + dn]
    }
}

/// A random isometric tensor network on a `rows x cols` lattice, sites in
/// row-major order from the bottom row.
#[derive(Clone, Debug)]
pub struct PepsState {
    pub layout: LatticeLayout,
    pub sites: Vec<PepsSite>,
    pub seed: Option<u64>,
}

/// Samples an `L x L` isometric PEPS.
pub fn sample_peps<R: Rng + ?Sized>(l: usize, d: usize, chi: usize, rng: &mut R) -> Result<PepsState> {
    if l < 2 {
        return Err(Error::InvalidParams(format!("PEPS needs L >= 2, got {l}")));
    }
    sample_lattice(l, l, d, chi, rng)
}

/// Same construction on a rectangle.
pub fn sample_lattice<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    d: usize,
    chi: usize,
    rng: &mut R,
) -> Result<PepsState> {
    let layout = LatticeLayout::new(rows, cols, d, chi)?;
    let mut sites = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let s = layout.site(r, c);
            let v = haar_isometry(d * s.right * s.up, s.input(), rng);
            let mut data = vec![C64::new(0.0, 0.0); d * s.input() * s.right * s.up];
            let mut idx = 0;
            for x in 0..d {
                for li in 0..s.left {
                    for ri in 0..s.right {
                        for ui in 0..s.up {
                            for di in 0..s.down {
                                data[idx] = v[((x * s.right + ri) * s.up + ui, li * s.down + di)];
                                idx += 1;
                            }
                        }
                    }
                }
            }
            sites.push(PepsSite { left: s.left, right: s.right, up: s.up, down: s.down, data });
        }
    }
    Ok(PepsState { layout, sites, seed: None })
}

impl PepsState {
    pub fn n(&self) -> usize {
        self.sites.len()
    }

    /// `⟨x|ψ⟩` by a bottom-to-top row sweep, `x` in row-major order.
    pub fn amplitude(&self, x: &[usize]) -> Result<Amplitude> {
        let lay = &self.layout;
        if x.len() != self.n() || x.iter().any(|&xi| xi >= lay.d) {
            return Err(Error::InvalidParams(format!("basis string {x:?} does not fit the state")));
        }
        let mut boundary = vec![C64::new(1.0, 0.0)];
        let mut ln_scale = 0.0;
        for r in 0..lay.rows {
            let downs: Vec<usize> = (0..lay.cols).map(|c| lay.site(r, c).down).collect();
            let mut prefix = 1;
            for c in 0..lay.cols {
                let idx = r * lay.cols + c;
                let s = &self.sites[idx];
                let suffix: usize = downs[c + 1..].iter().product();
                let mut mat = vec![C64::new(0.0, 0.0); s.left * s.down * s.up * s.right];
                for li in 0..s.left {
                    for di in 0..s.down {
                        for ui in 0..s.up {
                            for ri in 0..s.right {
                                mat[((li * s.down + di) * s.up + ui) * s.right + ri] =
                                    s.at(x[idx], li, ri, ui, di);
                            }
                        }
                    }
                }
                boundary = zipper_step(&boundary, prefix, s.left, s.down, suffix, &mat, s.up, s.right);
                prefix *= s.up;
                let m = boundary.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
                if m == 0.0 {
                    return Ok(Amplitude::from_parts(0.0, C64::new(0.0, 0.0)));
                }
                boundary.iter_mut().for_each(|z| *z /= m);
                ln_scale += m.ln();
            }
        }
        Ok(Amplitude::from_parts(ln_scale, boundary[0]))
    }

    pub fn amplitude_zero(&self) -> Result<Amplitude> {
        self.amplitude(&vec![0; self.n()])
    }

    /// `Σ_x |⟨x|ψ⟩|²` by enumeration; small lattices only.
    pub fn dense_norm2(&self) -> Result<f64> {
        let (n, d) = (self.n(), self.layout.d);
        if n > 14 {
            return Err(Error::InvalidParams("dense norm limited to 14 sites".into()));
        }
        let mut x = vec![0usize; n];
        let mut total = 0.0;
        loop {
            total += self.amplitude(&x)?.value().norm_sqr();
            let mut i = n;
            loop {
                if i == 0 {
                    return Ok(total);
                }
                i -= 1;
                x[i] += 1;
                if x[i] < d {
                    break;
                }
                x[i] = 0;
            }
        }
    }
}

/// Which moment a [`MomentEstimate`] estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// `D E|⟨x|ψ⟩|^{2k}`.
    Ipr,
    /// `E|⟨ψ|ψ'⟩|^{2k}`.
    FramePotential,
}

impl Quantity {
    pub fn tag(&self) -> &'static str {
        match self {
            Quantity::Ipr => "ipr",
            Quantity::FramePotential => "fp",
        }
    }
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentEstimate {
    pub quantity: Quantity,
    pub k: usize,
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
}

impl MomentEstimate {
    /// Mean and standard error of `exp(k ln w - ln_scale)`.
    pub fn from_log_w(log_w: &[f64], k: usize, ln_scale: f64, quantity: Quantity) -> Result<Self> {
        if log_w.len() < 2 {
            return Err(Error::InvalidParams("an estimate needs at least 2 samples".into()));
        }
        let (mut mean, mut m2) = (0.0f64, 0.0f64);
        for (i, &lw) in log_w.iter().enumerate() {
            let v = (k as f64 * lw - ln_scale).exp();
            let delta = v - mean;
            mean += delta / (i + 1) as f64;
            m2 += delta * (v - mean);
        }
        let n = log_w.len() as f64;
        let var = m2 / (n - 1.0);
        Ok(Self { quantity, k, mean, stderr: (var / n).sqrt(), count: log_w.len() })
    }

    /// Distance to `target` in units of the standard error.
    pub fn sigmas_from(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.stderr
    }
}

/// Counts of `w` in log-spaced bins.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
    pub below: u64,
    pub above: u64,
}

impl Histogram {
    pub fn log_spaced(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) || bins == 0 {
            return Err(Error::InvalidParams(format!("bad histogram range [{lo}, {hi}] x {bins}")));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let edges = (0..=bins).map(|i| (a + (b - a) * i as f64 / bins as f64).exp()).collect();
        Ok(Self { edges, counts: vec![0; bins], total: 0, below: 0, above: 0 })
    }

    /// 100 bins over `[1e-4, 1e2]`.
    pub fn default_range() -> Self {
        Self::log_spaced(1e-4, 1e2, 100).expect("static range is valid")
    }

    pub fn add_log(&mut self, ln_w: f64) {
        self.total += 1;
        let (a, b) = (self.edges[0].ln(), self.edges[self.edges.len() - 1].ln());
        if ln_w < a {
            self.below += 1;
        } else if ln_w >= b {
            self.above += 1;
        } else {
            let bins = self.counts.len();
            let i = (((ln_w - a) / (b - a)) * bins as f64) as usize;
            self.counts[i.min(bins - 1)] += 1;
        }
    }

    pub fn with_log_w(mut self, log_w: &[f64]) -> Self {
        for &lw in log_w {
            self.add_log(lw);
        }
        self
    }
}

/// Estimate, histogram and raw `ln w` values of one Monte Carlo run.
#[derive(Clone, Debug)]
pub struct McOutput {
    pub estimate: MomentEstimate,
    pub histogram: Histogram,
    pub log_w: Vec<f64>,
}

fn map_samples<F>(samples: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(u64) -> Result<f64> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..samples as u64).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..samples as u64).map(f).collect()
    }
}

/// `ln |⟨x|ψ⟩|²` for one open-chain RMPS drawn from `rng`, without
/// building the state.
///
/// Consumes exactly the Gaussian draws of [`sample_rmps`] and yields the
/// same amplitude: with `G = Q R`, `R` having a positive diagonal, the
/// isometry is `V = G R⁻¹`, so the rows selected by `x_i` act on the
/// running vector as `G_x (R⁻¹ v)` and `Q` is never formed.
pub fn chain_log_amp2<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    chi: usize,
    x: &[usize],
    rng: &mut R,
) -> Result<f64> {
    if x.len() != n || x.iter().any(|&xi| xi >= d) {
        return Err(Error::InvalidParams(format!("basis string {x:?} does not fit the chain")));
    }
    let bonds = chain_layout(n, d, chi)?;
    let mut v = nalgebra::DVector::<C64>::from_element(1, C64::new(1.0, 0.0));
    let mut ln_scale = 0.0;
    for i in 0..n {
        let (left, right) = (bonds[i], bonds[i + 1]);
        let g = ginibre(d * right, left, rng);
        let mut r = g.clone().qr().r();
        // phase-correct so that the diagonal of R is real positive
        for j in 0..left {
            let rjj = r[(j, j)];
            let nrm = rjj.norm();
            if nrm > 0.0 {
                let ph = (rjj / nrm).conj();
                r.row_mut(j).iter_mut().for_each(|z| *z *= ph);
            }
        }
        let w = r
            .solve_upper_triangular(&v)
            .ok_or_else(|| Error::Domain("singular Gaussian draw".into()))?;
        v = g.rows(x[i] * right, right) * w;
        let s = v.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if s == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        v.iter_mut().for_each(|z| *z /= s);
        ln_scale += s.ln();
    }
    Ok(2.0 * (ln_scale + v[0].norm().ln()))
}

/// `ln w` with `w = D |⟨x|ψ⟩|²` for `samples` independent states, where
/// `x` defaults to `0…0`.
pub fn sample_log_w_ipr(
    p: &EnsembleParams,
    samples: usize,
    seed: u64,
    basis: Option<&[usize]>,
) -> Result<Vec<f64>> {
    let p = p.validated()?;
    let ln_d = p.ln_dim();
    let zeros = vec![0usize; p.n];
    let x = basis.unwrap_or(&zeros);
    match p.geometry {
        Geometry::Chain => {
            if p.boundary == Boundary::Obc {
                chain_layout(p.n, p.d, p.chi)?;
                return map_samples(samples, |i| {
                    let mut rng = stream_rng(seed, i);
                    Ok(ln_d + chain_log_amp2(p.n, p.d, p.chi, x, &mut rng)?)
                });
            }
            map_samples(samples, |i| {
                let mut rng = stream_rng(seed, i);
                let s = sample_rmps(p.n, p.d, p.chi, p.boundary, &mut rng)?;
                Ok(ln_d + s.amplitude(x)?.ln_abs2())
            })
        }
        Geometry::Square(l) => {
            LatticeLayout::new(l, l, p.d, p.chi)?;
            map_samples(samples, |i| {
                let mut rng = stream_rng(seed, i);
                let s = sample_peps(l, p.d, p.chi, &mut rng)?;
                Ok(ln_d + s.amplitude(x)?.ln_abs2())
            })
        }
    }
}

/// `ln w` with `w = D |⟨ψ|ψ'⟩|²` for independent open-chain pairs.
pub fn sample_log_w_fp(p: &EnsembleParams, samples: usize, seed: u64) -> Result<Vec<f64>> {
    let p = p.validated()?;
    if p.geometry != Geometry::Chain || p.boundary != Boundary::Obc {
        return Err(Error::InvalidParams("frame potential sampling needs an open chain".into()));
    }
    chain_layout(p.n, p.d, p.chi)?;
    let ln_d = p.ln_dim();
    map_samples(samples, |i| {
        let mut rng = stream_rng(seed, i);
        let a = sample_rmps(p.n, p.d, p.chi, Boundary::Obc, &mut rng)?;
        let b = sample_rmps(p.n, p.d, p.chi, Boundary::Obc, &mut rng)?;
        Ok(ln_d + overlap(&a, &b)?.ln_abs2())
    })
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 100 {
        Err(Error::InvalidParams(format!("need at least 100 samples, got {samples}")))
    } else {
        Ok(())
    }
}

/// Monte Carlo IPR `D E|⟨0|ψ⟩|^{2k}` with histogram of `w`.
pub fn mc_ipr(p: &EnsembleParams, samples: usize, seed: u64) -> Result<McOutput> {
    check_samples(samples)?;
    let log_w = sample_log_w_ipr(p, samples, seed, None)?;
    let ln_scale = (p.k as f64 - 1.0) * p.ln_dim();
    Ok(McOutput {
        estimate: MomentEstimate::from_log_w(&log_w, p.k, ln_scale, Quantity::Ipr)?,
        histogram: Histogram::default_range().with_log_w(&log_w),
        log_w,
    })
}

/// Monte Carlo frame potential `E|⟨ψ|ψ'⟩|^{2k}` with histogram of `w`.
pub fn mc_fp(p: &EnsembleParams, samples: usize, seed: u64) -> Result<McOutput> {
    check_samples(samples)?;
    let log_w = sample_log_w_fp(p, samples, seed)?;
    let ln_scale = p.k as f64 * p.ln_dim();
    Ok(McOutput {
        estimate: MomentEstimate::from_log_w(&log_w, p.k, ln_scale, Quantity::FramePotential)?,
        histogram: Histogram::default_range().with_log_w(&log_w),
        log_w,
    })
}
