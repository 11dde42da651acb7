//! The subcommands. Each returns how many rows it wrote and how many of
//! them are error rows; configuration and budget problems abort early.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rtn_core::closed_form::*;
use rtn_core::contraction::{
    check_budget, fit_fp_constant, fp_contract, ipr_obc_contract, ipr_pbc_contract, peps_ipr,
    ContractionConfig, FpPoint,
};
use rtn_core::distributions::*;
use rtn_core::replica_algebra::{gram_matrix, weingarten_matrix, MatrixKind, ReplicaMatrix, SymGroup};
use rtn_core::sampler::{sample_log_w_fp, sample_log_w_ipr, Histogram, MomentEstimate, Quantity};
use rtn_core::Error;

use crate::cli::*;
use crate::formats::*;
use crate::grid::{parse_f64_list, parse_usize_list};
use crate::output::{RowWriter, FLUSH_EVERY};

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Budget(String),
    Io(io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 1,
            RunError::Budget(_) => 2,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "configuration error: {m}"),
            RunError::Budget(m) => write!(f, "budget exceeded: {m}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Io(e)
    }
}

/// Rows written, and how many of them report an error.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Report {
    pub rows: usize,
    pub error_rows: usize,
}

impl Report {
    pub fn exit_code(&self) -> u8 {
        if self.error_rows > 0 {
            3
        } else {
            0
        }
    }
}

pub fn run(cli: Cli) -> Result<Report, RunError> {
    match cli.command {
        Command::IprExact(a) => ipr_exact(&a),
        Command::Sample(a) => sample(&a),
        Command::Contract(a) => contract(&a),
        Command::Dist(a) => dist(&a),
        Command::Matrix(a) => matrix(&a),
    }
}

fn open(path: Option<&Path>) -> Result<Box<dyn Write>, RunError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            RunError::Config(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn positive_grid(name: &str, s: &str) -> Result<Vec<usize>, RunError> {
    let v = parse_usize_list(s).map_err(|e| RunError::Config(format!("--{name}: {e}")))?;
    if v.contains(&0) {
        return Err(RunError::Config(format!("--{name}: values must be positive")));
    }
    Ok(v)
}

fn dims(s: &str) -> Result<Vec<usize>, RunError> {
    let v = positive_grid("d", s)?;
    if v.iter().any(|&d| d < 2) {
        return Err(RunError::Config("--d: local dimension must be >= 2".into()));
    }
    Ok(v)
}

fn representable(v: LogValue) -> Option<f64> {
    let x = v.value();
    (x.is_finite() && x > 0.0).then_some(x)
}

fn version() -> String {
    format!("rtn {}", env!("CARGO_PKG_VERSION"))
}

fn map_ordered<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

fn boundary_of(b: BoundaryArg) -> Boundary {
    match b {
        BoundaryArg::Obc => Boundary::Obc,
        BoundaryArg::Pbc => Boundary::Pbc,
    }
}

fn boundary_tag(b: Boundary) -> &'static str {
    match b {
        Boundary::Obc => "obc",
        Boundary::Pbc => "pbc",
    }
}

fn exact_tag(q: ExactQuantity) -> &'static str {
    match q {
        ExactQuantity::Ipr => "ipr",
        ExactQuantity::IprLeading => "ipr_leading",
        ExactQuantity::HaarIpr => "haar_ipr",
        ExactQuantity::HaarFp => "haar_fp",
        ExactQuantity::RpsIpr => "rps_ipr",
    }
}

type ExactPoint = (usize, usize, usize, usize, Boundary, ExactQuantity);

fn exact_row(&(n, d, chi, k, boundary, quantity): &ExactPoint, continuation: bool) -> IprExactRow {
    let mut row = IprExactRow {
        n,
        d,
        chi,
        k,
        boundary: boundary_tag(boundary),
        quantity: exact_tag(quantity),
        log_value: None,
        value: None,
        delta_vs_haar: None,
        error: None,
    };
    let p = EnsembleParams { n, d, chi, k, boundary, geometry: Geometry::Chain };
    let haar = haar_ipr(d, n, k);
    let result = p.validated().and_then(|p| match quantity {
        ExactQuantity::Ipr => match boundary {
            Boundary::Obc => rmps_ipr_obc(&p, continuation).map(|v| (v, haar)),
            Boundary::Pbc => rmps_ipr_pbc(&p).map(|v| (v, haar)),
        },
        ExactQuantity::IprLeading => Ok((rmps_ipr_leading(&p), haar)),
        ExactQuantity::HaarIpr => Ok((haar, haar)),
        ExactQuantity::HaarFp => Ok((haar_fp(d, n, k), haar_fp(d, n, k))),
        ExactQuantity::RpsIpr => Ok((rps_ipr(n, d, k), haar)),
    });
    match result {
        Ok((v, reference)) => {
            row.log_value = Some(v.ln);
            row.value = representable(v);
            row.delta_vs_haar = Some(v.delta_vs(reference));
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

pub fn ipr_exact(a: &IprExactArgs) -> Result<Report, RunError> {
    let ns = positive_grid("grid-N", &a.grid_n)?;
    let chis = positive_grid("grid-chi", &a.grid_chi)?;
    let ks = positive_grid("grid-k", &a.grid_k)?;
    let ds = dims(&a.d)?;
    let mut points: Vec<ExactPoint> = Vec::new();
    for &n in &ns {
        for &d in &ds {
            for &chi in &chis {
                for &k in &ks {
                    for &b in &a.boundary {
                        for &q in &a.quantity {
                            points.push((n, d, chi, k, boundary_of(b), q));
                        }
                    }
                }
            }
        }
    }
    let meta = [("version", version())];
    let mut w = RowWriter::new(open(a.output.out.as_deref())?, a.output.format, SCHEMA_IPR_EXACT, &meta, COLUMNS_IPR_EXACT)?;
    let mut report = Report::default();
    for chunk in points.chunks(FLUSH_EVERY) {
        for row in map_ordered(chunk, |p| exact_row(p, a.analytic_continuation)) {
            report.error_rows += usize::from(row.error.is_some());
            w.write(&row)?;
        }
    }
    report.rows = w.rows();
    w.finish(&[])?;
    Ok(report)
}

/// Chain lengths or lattice sides, and the matching parameter builder.
fn sizes(
    geometry: GeometryArg,
    grid_n: Option<&str>,
    grid_l: Option<&str>,
) -> Result<Vec<usize>, RunError> {
    match (geometry, grid_n, grid_l) {
        (GeometryArg::Chain, Some(n), None) => positive_grid("grid-N", n),
        (GeometryArg::Square, None, Some(l)) => positive_grid("grid-L", l),
        (GeometryArg::Chain, _, _) => Err(RunError::Config("chain geometry takes --grid-N only".into())),
        (GeometryArg::Square, _, _) => Err(RunError::Config("square geometry takes --grid-L only".into())),
    }
}

fn params(
    geometry: GeometryArg,
    size: usize,
    d: usize,
    chi: usize,
    k: usize,
    boundary: Boundary,
) -> rtn_core::Result<EnsembleParams> {
    match geometry {
        GeometryArg::Chain => EnsembleParams::chain(size, d, chi, k, boundary),
        GeometryArg::Square => EnsembleParams::square(size, d, chi, k),
    }
}

fn check_combination(q: QuantityArg, g: GeometryArg, b: BoundaryArg) -> Result<(), RunError> {
    match (q, g, b) {
        (QuantityArg::Fp, GeometryArg::Square, _) => {
            Err(RunError::Config("frame potentials are only available on chains".into()))
        }
        (QuantityArg::Fp, _, BoundaryArg::Pbc) => {
            Err(RunError::Config("frame potentials need open boundaries".into()))
        }
        (_, GeometryArg::Square, BoundaryArg::Pbc) => {
            Err(RunError::Config("square lattices have open boundaries".into()))
        }
        _ => Ok(()),
    }
}

fn geometry_tag(g: GeometryArg) -> &'static str {
    match g {
        GeometryArg::Chain => "chain",
        GeometryArg::Square => "square",
    }
}

fn quantity_of(q: QuantityArg) -> Quantity {
    match q {
        QuantityArg::Ipr => Quantity::Ipr,
        QuantityArg::Fp => Quantity::FramePotential,
    }
}

pub fn contract(a: &ContractArgs) -> Result<Report, RunError> {
    check_combination(a.quantity, a.geometry, a.boundary)?;
    if a.fit_a && a.quantity != QuantityArg::Fp {
        return Err(RunError::Config("--fit-a needs --quantity fp".into()));
    }
    let sizes = sizes(a.geometry, a.grid_n.as_deref(), a.grid_l.as_deref())?;
    let chis = positive_grid("grid-chi", &a.grid_chi)?;
    let ks = positive_grid("grid-k", &a.grid_k)?;
    let ds = dims(&a.d)?;
    let cfg = ContractionConfig {
        allow_large_fp: a.allow_large_fp,
        ..ContractionConfig::with_budget_mb(a.budget_mem_mb)
    };
    let boundary = boundary_of(a.boundary);
    let quantity = quantity_of(a.quantity);

    let mut points = Vec::new();
    let mut over = Vec::new();
    for &size in &sizes {
        for &d in &ds {
            for &chi in &chis {
                for &k in &ks {
                    if let Ok(p) = params(a.geometry, size, d, chi, k, boundary) {
                        if let Err(Error::Budget { required_bytes, .. }) = check_budget(&p, quantity, &cfg) {
                            over.push(format!("(size={size}, d={d}, chi={chi}, k={k}: {required_bytes} bytes)"));
                        }
                    }
                    points.push((size, d, chi, k));
                }
            }
        }
    }
    if !over.is_empty() {
        return Err(RunError::Budget(format!(
            "{} grid point(s) exceed {} MiB or the k >= 5 frame-potential gate: {}",
            over.len(),
            a.budget_mem_mb,
            over.join(", ")
        )));
    }

    let compute = |&(size, d, chi, k): &(usize, usize, usize, usize)| {
        let mut row = ContractRow {
            geometry: geometry_tag(a.geometry),
            boundary: boundary_tag(boundary),
            size,
            n: if a.geometry == GeometryArg::Square { size * size } else { size },
            d,
            chi,
            k,
            quantity: quantity.tag(),
            value_log: None,
            value: None,
            delta_vs_haar: None,
            error: None,
        };
        let result = params(a.geometry, size, d, chi, k, boundary).and_then(|p| {
            let haar = haar_ipr(d, p.n, k);
            match (a.geometry, quantity, boundary) {
                (GeometryArg::Square, _, _) => peps_ipr(size, d, chi, k, &cfg).map(|v| (v, haar)),
                (_, Quantity::FramePotential, _) => fp_contract(&p, &cfg).map(|v| (v, haar_fp(d, p.n, k))),
                (_, _, Boundary::Obc) => ipr_obc_contract(&p).map(|v| (v, haar)),
                (_, _, Boundary::Pbc) => ipr_pbc_contract(&p).map(|v| (v, haar)),
            }
        });
        match result {
            Ok((v, reference)) => {
                row.value_log = Some(v.ln);
                row.value = representable(v);
                row.delta_vs_haar = Some(v.delta_vs(reference));
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        row
    };

    let meta = [("version", version()), ("budget_mem_mb", a.budget_mem_mb.to_string())];
    let mut w = RowWriter::new(open(a.output.out.as_deref())?, a.output.format, SCHEMA_CONTRACT, &meta, COLUMNS_CONTRACT)?;
    let mut report = Report::default();
    let mut fit_points = Vec::new();
    for chunk in points.chunks(FLUSH_EVERY) {
        for row in map_ordered(chunk, compute) {
            report.error_rows += usize::from(row.error.is_some());
            if let Some(delta) = row.delta_vs_haar {
                fit_points.push(FpPoint { n: row.n, chi: row.chi, k: row.k, delta });
            }
            w.write(&row)?;
        }
    }
    report.rows = w.rows();
    let mut trailer = Vec::new();
    if a.fit_a {
        match fit_fp_constant(&fit_points) {
            Ok(fit) => {
                trailer.push(("fit_a", fit.a.to_string()));
                trailer.push(("fit_max_rel_residual", fit.max_rel_residual.to_string()));
                trailer.push(("fit_points", fit.points_used.to_string()));
                if let Some(path) = &a.fit_out {
                    let json = serde_json::json!({
                        "a": fit.a,
                        "max_rel_residual": fit.max_rel_residual,
                        "points_used": fit.points_used,
                    });
                    let mut f = open(Some(path))?;
                    writeln!(f, "{json}")?;
                    f.flush()?;
                }
            }
            Err(e) => {
                log::error!("fit failed: {e}");
                trailer.push(("fit_error", e.to_string()));
                report.error_rows += 1;
            }
        }
    }
    w.finish(&trailer)?;
    Ok(report)
}

/// Rough peak memory of one sampling run: retained samples plus one state.
fn sample_bytes(geometry: GeometryArg, size: usize, d: usize, chi: usize, samples: usize) -> u128 {
    let (size, d, chi) = (size as u128, d as u128, chi as u128);
    let state = match geometry {
        GeometryArg::Chain => size * d * chi * chi * 16,
        GeometryArg::Square => {
            size * size * d * chi.saturating_pow(4) * 16 + chi.saturating_pow(size as u32 + 1) * 16
        }
    };
    (samples as u128 * 8).saturating_add(state.saturating_mul(2))
}

/// Parameter of the scaling law a histogram is compared with.
fn scaling_gamma(quantity: Quantity, geometry: GeometryArg, n: usize, d: usize, chi: usize, a: f64) -> Option<f64> {
    match (quantity, geometry) {
        (Quantity::Ipr, GeometryArg::Chain) => Some(chi as f64 * d as f64 / (n as f64 * (d as f64 - 1.0))),
        (Quantity::FramePotential, GeometryArg::Chain) => Some((chi * chi) as f64 / (a * n as f64)),
        _ => None,
    }
}

pub fn sample(a: &SampleArgs) -> Result<Report, RunError> {
    check_combination(a.quantity, a.geometry, a.boundary)?;
    if a.samples < 100 {
        return Err(RunError::Config("--samples must be at least 100".into()));
    }
    if !(a.fp_a > 0.0) {
        return Err(RunError::Config("--fp-a must be positive".into()));
    }
    let sizes = sizes(a.geometry, a.grid_n.as_deref(), a.grid_l.as_deref())?;
    let chis = positive_grid("grid-chi", &a.grid_chi)?;
    let ks = positive_grid("grid-k", &a.grid_k)?;
    let ds = dims(&a.d)?;
    Histogram::log_spaced(a.hist_lo, a.hist_hi, a.bins).map_err(|e| RunError::Config(e.to_string()))?;
    let boundary = boundary_of(a.boundary);
    let quantity = quantity_of(a.quantity);
    let budget = u128::from(a.budget_mem_mb) << 20;
    let qcfg = QuadratureConfig::default();
    let started = Instant::now();

    let meta = [
        ("version", version()),
        ("seed", a.seed.to_string()),
        ("samples", a.samples.to_string()),
        ("quantity", quantity.tag().to_string()),
        ("geometry", geometry_tag(a.geometry).to_string()),
        ("boundary", boundary_tag(boundary).to_string()),
        ("normalized", (boundary == Boundary::Obc).to_string()),
    ];
    let mut w = RowWriter::new(open(a.output.out.as_deref())?, a.output.format, SCHEMA_ESTIMATES, &meta, COLUMNS_ESTIMATES)?;
    let mut hist = match &a.hist_out {
        Some(p) => Some(RowWriter::new(open(Some(p))?, a.output.format, SCHEMA_HISTOGRAM, &meta, COLUMNS_HISTOGRAM)?),
        None => None,
    };
    let mut raw = match &a.raw_out {
        Some(p) => Some(open(Some(p))?),
        None => None,
    };
    let mut report = Report::default();
    let mut aborted = None;

    'grid: for &size in &sizes {
        for &d in &ds {
            for &chi in &chis {
                let need = sample_bytes(a.geometry, size, d, chi, a.samples);
                if need > budget {
                    aborted = Some(format!(
                        "size={size}, d={d}, chi={chi} needs about {need} bytes, budget {} MiB",
                        a.budget_mem_mb
                    ));
                    break 'grid;
                }
                let k_max = *ks.iter().max().expect("grid is non-empty");
                let drawn = params(a.geometry, size, d, chi, k_max, boundary).and_then(|p| {
                    let log_w = match quantity {
                        Quantity::Ipr => sample_log_w_ipr(&p, a.samples, a.seed, None)?,
                        Quantity::FramePotential => sample_log_w_fp(&p, a.samples, a.seed)?,
                    };
                    Ok((p, log_w))
                });
                let n = if a.geometry == GeometryArg::Square { size * size } else { size };
                let base = EstimateRow {
                    geometry: geometry_tag(a.geometry),
                    boundary: boundary_tag(boundary),
                    n,
                    d,
                    chi,
                    k: 0,
                    quantity: quantity.tag(),
                    mean: None,
                    stderr: None,
                    samples: a.samples,
                    seed: a.seed,
                    gamma: None,
                    ks: None,
                    error: None,
                };
                let (p, log_w) = match drawn {
                    Ok(x) => x,
                    Err(e) => {
                        for &k in &ks {
                            w.write(&EstimateRow { k, error: Some(e.to_string()), ..base.clone() })?;
                            report.error_rows += 1;
                        }
                        continue;
                    }
                };
                let gamma = scaling_gamma(quantity, a.geometry, n, d, chi, a.fp_a);
                let ks_value = match (a.ks, gamma) {
                    (true, Some(g)) => {
                        let ws: Vec<f64> = log_w.iter().map(|x| x.exp()).collect();
                        match ks_distance(&ws, &DistributionSpec::ScalingPt { gamma: g }, &qcfg) {
                            Ok(v) => Some(v),
                            Err(e) => {
                                log::warn!("KS failed at N={n}, chi={chi}: {e}");
                                None
                            }
                        }
                    }
                    _ => None,
                };
                for &k in &ks {
                    let ln_scale = match quantity {
                        Quantity::Ipr => (k as f64 - 1.0) * p.ln_dim(),
                        Quantity::FramePotential => k as f64 * p.ln_dim(),
                    };
                    let row = match MomentEstimate::from_log_w(&log_w, k, ln_scale, quantity) {
                        Ok(est) => EstimateRow {
                            k,
                            mean: Some(est.mean),
                            stderr: Some(est.stderr),
                            gamma: if a.ks { gamma } else { None },
                            ks: ks_value,
                            ..base.clone()
                        },
                        Err(e) => {
                            report.error_rows += 1;
                            EstimateRow { k, error: Some(e.to_string()), ..base.clone() }
                        }
                    };
                    w.write(&row)?;
                }
                if let Some(h) = hist.as_mut() {
                    let histogram = Histogram::log_spaced(a.hist_lo, a.hist_hi, a.bins)
                        .expect("range checked above")
                        .with_log_w(&log_w);
                    for row in histogram_rows(&histogram, geometry_tag(a.geometry), n, d, chi, quantity.tag()) {
                        h.write(&row)?;
                    }
                }
                if let Some(r) = raw.as_mut() {
                    let label = format!(
                        "geometry={} N={n} d={d} chi={chi} quantity={} seed={}",
                        geometry_tag(a.geometry),
                        quantity.tag(),
                        a.seed
                    );
                    write_log_w(&mut *r, &label, &log_w)?;
                }
                w.flush()?;
            }
        }
    }
    report.rows = w.rows();
    let trailer = [("wall_time_s", format!("{:.3}", started.elapsed().as_secs_f64()))];
    w.finish(&trailer)?;
    if let Some(h) = hist {
        h.finish(&[])?;
    }
    if let Some(mut r) = raw {
        r.flush()?;
    }
    match aborted {
        Some(msg) => Err(RunError::Budget(msg)),
        None => Ok(report),
    }
}

fn family_specs(a: &DistArgs) -> Result<Vec<(DistributionSpec, String)>, RunError> {
    let mut out = Vec::new();
    for f in &a.family {
        match f {
            Family::Pt => out.push((DistributionSpec::PorterThomas { dim: None }, String::new())),
            Family::PtFinite => {
                let dims = parse_f64_list(&a.dim).map_err(|e| RunError::Config(format!("--dim: {e}")))?;
                for dim in dims {
                    out.push((DistributionSpec::PorterThomas { dim: Some(dim) }, format!("D={dim}")));
                }
            }
            Family::Scaling => {
                let gammas =
                    parse_f64_list(&a.grid_gamma).map_err(|e| RunError::Config(format!("--grid-gamma: {e}")))?;
                for g in gammas {
                    out.push((DistributionSpec::ScalingPt { gamma: g }, format!("gamma={g}")));
                }
            }
            Family::RpsExact => {
                for n in positive_grid("grid-N", &a.grid_n)? {
                    out.push((DistributionSpec::RpsExactD2 { n }, format!("N={n} d=2")));
                }
            }
            Family::RpsLognormal => {
                for n in positive_grid("grid-N", &a.grid_n)? {
                    for d in dims(&a.d)? {
                        out.push((DistributionSpec::RpsLognormal { n, d }, format!("N={n} d={d}")));
                    }
                }
            }
        }
    }
    for (spec, _) in &out {
        spec.validate().map_err(|e| RunError::Config(e.to_string()))?;
    }
    Ok(out)
}

pub fn dist(a: &DistArgs) -> Result<Report, RunError> {
    if !(a.w_min > 0.0 && a.w_max > a.w_min) || a.points < 2 {
        return Err(RunError::Config("need 0 < w-min < w-max and at least 2 points".into()));
    }
    if a.moments > 0 && a.moments_out.is_none() {
        return Err(RunError::Config("--moments needs --moments-out".into()));
    }
    if a.ks_samples.is_some() != a.ks_out.is_some() {
        return Err(RunError::Config("--ks-samples and --ks-out go together".into()));
    }
    let cfg = match a.quadrature {
        QuadArg::Simpson => QuadratureConfig::default(),
        QuadArg::GaussHermite => {
            if a.gh_nodes < 2 {
                return Err(RunError::Config("--gh-nodes must be at least 2".into()));
            }
            QuadratureConfig::gauss_hermite(a.gh_nodes)
        }
    };
    let specs = family_specs(a)?;
    let grid = log_grid(a.w_min, a.w_max, a.points);
    let meta = [("version", version())];
    let mut report = Report::default();

    let mut w = RowWriter::new(open(a.output.out.as_deref())?, a.output.format, SCHEMA_CURVES, &meta, COLUMNS_CURVES)?;
    for (spec, param) in &specs {
        let rows = map_ordered(&grid, |&x| {
            let both = pdf(spec, x, &cfg).and_then(|p| Ok((p, cdf(spec, x, &cfg)?)));
            match both {
                Ok((p, c)) => CurveRow { family: spec.name(), param: param.clone(), w: x, pdf: Some(p), cdf: Some(c), error: None },
                Err(e) => CurveRow { family: spec.name(), param: param.clone(), w: x, pdf: None, cdf: None, error: Some(e.to_string()) },
            }
        });
        for row in rows {
            report.error_rows += usize::from(row.error.is_some());
            w.write(&row)?;
        }
    }
    report.rows = w.rows();
    w.finish(&[])?;

    if let Some(path) = &a.moments_out {
        let mut m = RowWriter::new(open(Some(path))?, a.output.format, SCHEMA_MOMENTS, &meta, COLUMNS_MOMENTS)?;
        for (spec, param) in &specs {
            let tolerance = match spec {
                DistributionSpec::ScalingPt { .. } => 1e-6,
                _ => 1e-8,
            };
            let ks: Vec<usize> = (0..=a.moments).collect();
            for row in map_ordered(&ks, |&k| match moment(spec, k, &cfg) {
                Ok(v) => {
                    let rel_err = v.reference.map(|r| (v.quadrature - r).abs() / r.abs());
                    MomentRow {
                        family: spec.name(),
                        param: param.clone(),
                        k,
                        quadrature: Some(v.quadrature),
                        reference: v.reference,
                        rel_err,
                        tolerance,
                        within: rel_err.map(|e| e <= tolerance),
                        error: None,
                    }
                }
                Err(e) => MomentRow {
                    family: spec.name(),
                    param: param.clone(),
                    k,
                    quadrature: None,
                    reference: moment_reference(spec, k),
                    rel_err: None,
                    tolerance,
                    within: None,
                    error: Some(e.to_string()),
                },
            }) {
                report.error_rows += usize::from(row.error.is_some());
                m.write(&row)?;
            }
        }
        report.rows += m.rows();
        m.finish(&[])?;
    }

    if let (Some(input), Some(path)) = (&a.ks_samples, &a.ks_out) {
        let file = File::open(input)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", input.display())))?;
        let log_w = read_log_w(io::BufReader::new(file))?;
        let ws: Vec<f64> = log_w.iter().map(|x| x.exp()).collect();
        let mut kw = RowWriter::new(open(Some(path))?, a.output.format, SCHEMA_KS, &meta, COLUMNS_KS)?;
        for (spec, param) in &specs {
            let row = match ks_distance(&ws, spec, &cfg) {
                Ok(v) => KsRow { family: spec.name(), param: param.clone(), samples: ws.len(), ks: Some(v), error: None },
                Err(e) => KsRow { family: spec.name(), param: param.clone(), samples: ws.len(), ks: None, error: Some(e.to_string()) },
            };
            report.error_rows += usize::from(row.error.is_some());
            kw.write(&row)?;
        }
        report.rows += kw.rows();
        kw.finish(&[])?;
    }
    Ok(report)
}

pub fn matrix(a: &MatrixArgs) -> Result<Report, RunError> {
    let cfg_err = |e: Error| RunError::Config(e.to_string());
    let m = match a.kind {
        MatrixKindArg::Gram => {
            let q = a.q.ok_or_else(|| RunError::Config("--q is required".into()))?;
            gram_matrix(a.k, q).map_err(cfg_err)?
        }
        MatrixKindArg::Weingarten => {
            let q = a.q.ok_or_else(|| RunError::Config("--q is required".into()))?;
            weingarten_matrix(a.k, q).map_err(cfg_err)?
        }
        MatrixKindArg::Transfer => {
            let chi = a.chi.ok_or_else(|| RunError::Config("--chi is required".into()))?;
            SymGroup::new(a.k).map_err(cfg_err)?;
            let t = rtn_core::contraction::ipr_transfer(a.d, chi, a.k).map_err(cfg_err)?;
            ReplicaMatrix { k: a.k, q: chi as u64, kind: MatrixKind::Transfer, entries: t.matrix }
        }
    };
    let out = open(a.out.as_deref())?;
    write_replica_matrix(out, &m)?;
    Ok(Report { rows: m.dim(), error_rows: 0 })
}
