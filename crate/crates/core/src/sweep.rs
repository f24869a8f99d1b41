//! Convergence sweeps: entropy / (N ln N) over a list of sizes, next to the
//! asymptotic rate.
//!
//! CSV columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | `model` | family tag |
//! | `params` | `key=value` pairs separated by `;` |
//! | `size` | the size parameter swept (torus side for small_world) |
//! | `n` | vertex count N |
//! | `seeds` | replicates per point (Monte Carlo rows only use more than one) |
//! | `root_seed` | replicate `s` used seed `derive_seed(root_seed, s)` |
//! | `entropy_nats` | exact entropy, or the mean Monte Carlo estimate |
//! | `normalized_rate` | `entropy_nats / (N ln N)` |
//! | `target_rate` | asymptotic rate c |
//! | `stderr` | standard error of `entropy_nats`, empty for exact rows |
//! | `e_series_nats` | series approximation, hybrid rows only |
//! | `e_series_normalized` | `e_series_nats / (N ln N)` |

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::RateConstants;
use crate::error::{Error, Result};
use crate::hybrid::{e_series, mc_entropy, rate_hybrid, HybridParams, NameLength};
use crate::models::{exact_entropy, normalize, rate, ModelParams};
use crate::numeric::derive_seed;

/// Environment variable capping the worker pool size.
pub const THREADS_ENV: &str = "GNE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepModel {
    /// A family with an exact entropy; the size field of the template is
    /// replaced at every point.
    Exact { params: ModelParams },
    /// The ordered hybrid model, estimated by Monte Carlo. `n` is replaced
    /// at every point.
    Hybrid { params: HybridParams, link_samples: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub model: SweepModel,
    /// Strictly increasing. For small_world these are torus sides.
    pub sizes: Vec<u64>,
    pub seeds: u32,
    pub root_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub model: String,
    pub params: String,
    pub size: u64,
    pub n: u64,
    pub seeds: u32,
    pub root_seed: u64,
    pub entropy_nats: f64,
    pub normalized_rate: f64,
    pub target_rate: f64,
    pub stderr: Option<f64>,
    pub e_series_nats: Option<f64>,
    pub e_series_normalized: Option<f64>,
}

/// Copy of `params` with its size field set to `size`.
pub fn with_size(params: &ModelParams, size: u64) -> ModelParams {
    let mut p = *params;
    match &mut p {
        ModelParams::ErBinary { n, .. }
        | ModelParams::ErNamed { n, .. }
        | ModelParams::Hamming { n, .. }
        | ModelParams::TreeSequential { n }
        | ModelParams::TreeUniform { n } => *n = size,
        ModelParams::SmallWorld { side, .. } => *side = size,
    }
    p
}

fn describe(params: &ModelParams) -> String {
    match *params {
        ModelParams::ErBinary { alpha, .. } => format!("alpha={alpha}"),
        ModelParams::ErNamed { alpha, beta, alphabet, .. } => format!("alpha={alpha};beta={beta};A={alphabet}"),
        ModelParams::SmallWorld { alpha, gamma, .. } => format!("alpha={alpha};gamma={gamma}"),
        ModelParams::Hamming { alpha, beta, alphabet, d, .. } => {
            format!("alpha={alpha};beta={beta};A={alphabet};d={d}")
        }
        ModelParams::TreeSequential { .. } | ModelParams::TreeUniform { .. } => String::new(),
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::validation("size list is empty"));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("size list must be strictly increasing"));
        }
        if self.seeds == 0 {
            return Err(Error::validation("seeds must be at least 1"));
        }
        match &self.model {
            SweepModel::Exact { params } => {
                for &s in &self.sizes {
                    with_size(params, s).validate()?;
                }
                rate(params.tag(), &params.rate_constants())?;
            }
            SweepModel::Hybrid { params, link_samples } => {
                if !params.ordered {
                    return Err(Error::validation(
                        "hybrid sweeps estimate the ordered model only; the unordered entropy has no finite-N estimator",
                    ));
                }
                if *link_samples == 0 {
                    return Err(Error::validation("link samples must be at least 1"));
                }
                for &s in &self.sizes {
                    HybridParams { n: s, ..*params }.validate()?;
                }
            }
        }
        Ok(())
    }
}

fn exact_row(spec: &SweepSpec, params: &ModelParams, size: u64, target: f64) -> Result<CsvRow> {
    let p = with_size(params, size);
    let report = exact_entropy(&p)?;
    Ok(CsvRow {
        model: p.tag().name().to_string(),
        params: describe(&p),
        size,
        n: p.vertex_count(),
        seeds: spec.seeds,
        root_seed: spec.root_seed,
        entropy_nats: report.nats,
        normalized_rate: report.normalized_rate,
        target_rate: target,
        stderr: None,
        e_series_nats: None,
        e_series_normalized: None,
    })
}

fn hybrid_row(spec: &SweepSpec, params: &HybridParams, link_samples: u32, size: u64, target: f64) -> Result<CsvRow> {
    let p = HybridParams { n: size, ..*params };
    let reports: Vec<_> = (0..spec.seeds as u64)
        .into_par_iter()
        .map(|s| mc_entropy(&p, link_samples, derive_seed(spec.root_seed, s)))
        .collect::<Result<_>>()?;
    let k = reports.len() as f64;
    let mean = reports.iter().map(|r| r.nats).sum::<f64>() / k;
    let var_sum: f64 = reports.iter().map(|r| r.stderr.unwrap_or(0.0).powi(2)).sum();
    let c = RateConstants {
        alpha: Some(p.alpha),
        beta: Some(p.beta),
        alphabet: Some(p.alphabet),
        gamma: None,
        d: None,
    };
    let series = e_series(size, &c, NameLength::Realized)?;
    Ok(CsvRow {
        model: "hybrid_ordered".to_string(),
        params: format!("alpha={};beta={};A={};link_samples={link_samples}", p.alpha, p.beta, p.alphabet),
        size,
        n: size,
        seeds: spec.seeds,
        root_seed: spec.root_seed,
        entropy_nats: mean,
        normalized_rate: normalize(mean, size),
        target_rate: target,
        stderr: Some(var_sum.sqrt() / k),
        e_series_nats: Some(series.total),
        e_series_normalized: Some(series.normalized),
    })
}

/// Computes one row per size, in size order. All validation happens before
/// any point is evaluated.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<CsvRow>> {
    spec.validate()?;
    match &spec.model {
        SweepModel::Exact { params } => {
            let target = rate(params.tag(), &params.rate_constants())?;
            spec.sizes.par_iter().map(|&s| exact_row(spec, params, s, target)).collect()
        }
        SweepModel::Hybrid { params, link_samples } => {
            let c = RateConstants {
                alpha: Some(params.alpha),
                beta: Some(params.beta),
                alphabet: Some(params.alphabet),
                gamma: None,
                d: None,
            };
            let target = rate_hybrid(&c, true, 1e-12)?;
            spec.sizes
                .par_iter()
                .map(|&s| hybrid_row(spec, params, *link_samples, s, target))
                .collect()
        }
    }
}

pub fn write_csv<W: Write>(w: W, rows: &[CsvRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv_file(path: impl AsRef<Path>, rows: &[CsvRow]) -> Result<()> {
    write_csv(std::fs::File::create(path)?, rows)
}

/// Worker count from `GNE_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(Error::validation(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

/// Runs `f` on a pool sized by [`thread_cap`].
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = thread_cap()? {
        builder = builder.num_threads(k);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Capacity(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}
