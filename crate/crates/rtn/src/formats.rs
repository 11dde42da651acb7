//! Row types of every CSV / JSON-lines product, plus the replica-matrix
//! table.

use std::io::{self, Write};

use rtn_core::replica_algebra::ReplicaMatrix;
use rtn_core::sampler::Histogram;
use serde::Serialize;

/// Schema tags; bump the suffix when columns change.
pub const SCHEMA_IPR_EXACT: &str = "rtn.ipr-exact/1";
pub const SCHEMA_CONTRACT: &str = "rtn.contract/1";
pub const SCHEMA_ESTIMATES: &str = "rtn.estimates/1";
pub const SCHEMA_HISTOGRAM: &str = "rtn.histogram/1";
pub const SCHEMA_CURVES: &str = "rtn.density/1";
pub const SCHEMA_MOMENTS: &str = "rtn.moments/1";
pub const SCHEMA_KS: &str = "rtn.ks/1";

pub const COLUMNS_IPR_EXACT: &str = "N sites, d local dimension, chi bond dimension, k moment order, \
boundary obc|pbc, quantity, log_value natural log, value linear (empty if not representable), \
delta_vs_haar = value/haar - 1, error message on failed rows; all quantities dimensionless";
pub const COLUMNS_CONTRACT: &str = "geometry chain|square, boundary, size N (chain) or L (square), \
N sites, d, chi, k, quantity ipr|fp, value_log natural log, value linear, delta_vs_haar, error; \
all quantities dimensionless";
pub const COLUMNS_ESTIMATES: &str = "geometry, boundary, N, d, chi, k, quantity ipr|fp, mean of the \
moment estimator, stderr standard error, samples, seed, gamma of the scaling law compared against, \
ks distance to it, error; all quantities dimensionless";
pub const COLUMNS_HISTOGRAM: &str = "geometry, N, d, chi, quantity, bin_lo and bin_hi bin edges in w \
(0 and inf for the out-of-range bins), count";
pub const COLUMNS_CURVES: &str = "family, param, w overlap variable, pdf density, cdf, error";
pub const COLUMNS_MOMENTS: &str = "family, param, k, quadrature value, reference closed form, \
rel_err, tolerance, within tolerance, error";
pub const COLUMNS_KS: &str = "family, param, samples, ks distance, error";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IprExactRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub chi: usize,
    pub k: usize,
    pub boundary: &'static str,
    pub quantity: &'static str,
    pub log_value: Option<f64>,
    pub value: Option<f64>,
    pub delta_vs_haar: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractRow {
    pub geometry: &'static str,
    pub boundary: &'static str,
    pub size: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub chi: usize,
    pub k: usize,
    pub quantity: &'static str,
    pub value_log: Option<f64>,
    pub value: Option<f64>,
    pub delta_vs_haar: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRow {
    pub geometry: &'static str,
    pub boundary: &'static str,
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub chi: usize,
    pub k: usize,
    pub quantity: &'static str,
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub gamma: Option<f64>,
    pub ks: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramRow {
    pub geometry: &'static str,
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub chi: usize,
    pub quantity: &'static str,
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub family: &'static str,
    pub param: String,
    pub w: f64,
    pub pdf: Option<f64>,
    pub cdf: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub family: &'static str,
    pub param: String,
    pub k: usize,
    pub quadrature: Option<f64>,
    pub reference: Option<f64>,
    pub rel_err: Option<f64>,
    pub tolerance: f64,
    pub within: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsRow {
    pub family: &'static str,
    pub param: String,
    pub samples: usize,
    pub ks: Option<f64>,
    pub error: Option<String>,
}

/// One row per bin, with the below/above counts as half-open end bins.
pub fn histogram_rows(
    h: &Histogram,
    geometry: &'static str,
    n: usize,
    d: usize,
    chi: usize,
    quantity: &'static str,
) -> Vec<HistogramRow> {
    let row = |bin_lo, bin_hi, count| HistogramRow { geometry, n, d, chi, quantity, bin_lo, bin_hi, count };
    let last = h.edges[h.edges.len() - 1];
    let mut rows = vec![row(0.0, h.edges[0], h.below)];
    rows.extend(h.counts.iter().enumerate().map(|(i, &c)| row(h.edges[i], h.edges[i + 1], c)));
    rows.push(row(last, f64::INFINITY, h.above));
    rows
}

/// Row-major matrix with the canonical permutation labels (cycle
/// notation) as header and first column.
pub fn write_replica_matrix<W: Write>(out: W, m: &ReplicaMatrix) -> io::Result<()> {
    let mut out = out;
    writeln!(out, "# schema=rtn.replica-matrix/1")?;
    writeln!(out, "# kind={:?} k={} q={}", m.kind, m.k, m.q)?;
    writeln!(out, "# rows and columns follow the lexicographic order of S_k")?;
    let labels = m.labels();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["perm".to_string()];
    header.extend(labels.iter().cloned());
    w.write_record(&header)?;
    for (i, label) in labels.iter().enumerate() {
        let mut rec = vec![label.clone()];
        rec.extend((0..m.dim()).map(|j| format!("{:e}", m.entries[(i, j)])));
        w.write_record(&rec)?;
    }
    w.flush()
}

/// Reads `ln w` values, one per line, skipping `#` comments and blanks.
pub fn read_log_w<R: io::BufRead>(input: R) -> io::Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: f64 = t.parse().map_err(|_| {
            io::Error::new(io::ErrorKind::InvalidData, format!("line {}: `{t}` is not a number", i + 1))
        })?;
        out.push(v);
    }
    Ok(out)
}

/// Writes the raw `ln w` dump with a label line.
pub fn write_log_w<W: Write>(mut out: W, label: &str, log_w: &[f64]) -> io::Result<()> {
    writeln!(out, "# {label}")?;
    for v in log_w {
        writeln!(out, "{v:e}")?;
    }
    out.flush()
}
