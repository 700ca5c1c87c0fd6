//! Scenario runner: packages the library's verification machinery into
//! deterministic, seeded check suites with machine-readable reports.

mod lemma_a;
mod profile;
mod report;
mod theorem1;
mod theorem2;

pub use lemma_a::run_lemma_a;
pub use profile::{profile_exceptional, ProfileRow, ProfileTable};
pub use report::{render_reports, Check, CheckStatus, Report};
pub use theorem1::{run_theorem1, run_theorem1_on};
pub use theorem2::run_theorem2;

use crate::catalog::CatalogError;
use crate::levi::LeviError;
use crate::maps::MapError;
use crate::reinhardt::ReinhardtError;
use crate::stream::Streams;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;
use std::collections::BTreeMap;
use std::time::Instant;
use thiserror::Error;

/// Problems outside the claims themselves (broken references, unreadable
/// config, invalid input). These abort a run instead of failing a check.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Levi(#[from] LeviError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Reinhardt(#[from] ReinhardtError),
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("cannot read config `{path}`: {source}")]
    ConfigIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config `{path}`: {source}")]
    ConfigParse {
        path: String,
        #[source]
        source: Box<toml::de::Error>,
    },
}

pub const DEFAULT_SEED: u64 = 42;
/// Default sample count for identity-style checks.
pub const DEFAULT_SAMPLES: usize = 10_000;
/// Default sample count for Levi boundary scans.
pub const DEFAULT_SCAN_SAMPLES: usize = 2_000;

/// Knobs shared by every scenario.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    /// Base sample count; `None` uses the per-kind defaults.
    pub samples: Option<usize>,
    /// Global tolerance override applied to every check without a per-check
    /// override.
    pub tol: Option<f64>,
    /// Per-check tolerance overrides keyed by check id (strongest).
    pub tol_overrides: BTreeMap<String, f64>,
    /// Record wall-clock runtimes. Off by default so reports are
    /// byte-identical across machines and thread counts.
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            samples: None,
            tol: None,
            tol_overrides: BTreeMap::new(),
            timings: false,
        }
    }
}

impl RunConfig {
    pub(crate) fn identity_samples(&self) -> usize {
        self.samples.unwrap_or(DEFAULT_SAMPLES)
    }

    pub(crate) fn scan_samples(&self) -> usize {
        self.samples.unwrap_or(DEFAULT_SCAN_SAMPLES)
    }

    /// A tenth of the identity budget, for the slower located-boundary
    /// checks.
    pub(crate) fn tenth_samples(&self) -> usize {
        (self.identity_samples() / 10).max(1)
    }

    fn tolerance_for(&self, id: &str, default: f64) -> f64 {
        if let Some(t) = self.tol_overrides.get(id) {
            return *t;
        }
        self.tol.unwrap_or(default)
    }
}

/// Tolerance-override file: a `[tolerances]` table keyed by check id.
pub fn load_config(path: &str) -> Result<BTreeMap<String, f64>, HarnessError> {
    #[derive(serde::Deserialize)]
    #[serde(deny_unknown_fields)]
    struct ConfigFile {
        #[serde(default)]
        tolerances: BTreeMap<String, f64>,
    }
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::ConfigIo {
        path: path.to_string(),
        source,
    })?;
    let file: ConfigFile = toml::from_str(&text).map_err(|source| HarnessError::ConfigParse {
        path: path.to_string(),
        source: Box::new(source),
    })?;
    Ok(file.tolerances)
}

/// How a check body reports its measurement.
pub(crate) enum Outcome {
    /// Passes when the residual is at most the tolerance.
    Residual { value: f64, witness: Value },
    /// Passes when the observed value *exceeds* the tolerance — used for
    /// checks that must detect an asymmetry rather than bound an error.
    Exceeds { value: f64, witness: Value },
    /// Not executed; the note says why.
    Skip { note: String },
}

/// Accumulates checks for one scenario.
pub(crate) struct Ctx<'a> {
    cfg: &'a RunConfig,
    checks: Vec<Check>,
    warnings: Vec<String>,
}

impl<'a> Ctx<'a> {
    pub(crate) fn new(cfg: &'a RunConfig) -> Ctx<'a> {
        let mut warnings = Vec::new();
        if cfg.identity_samples() < 100 {
            warnings.push(format!(
                "low statistical coverage: only {} samples per identity check",
                cfg.identity_samples()
            ));
        }
        Ctx {
            cfg,
            checks: Vec::new(),
            warnings,
        }
    }

    /// Runs one check body with the effective tolerance and records it.
    pub(crate) fn run(
        &mut self,
        id: &str,
        description: &str,
        paper_ref: &str,
        default_tol: f64,
        body: impl FnOnce(f64) -> Outcome,
    ) {
        let tol = self.cfg.tolerance_for(id, default_tol);
        let start = Instant::now();
        let outcome = body(tol);
        let runtime_ms = if self.cfg.timings {
            start.elapsed().as_millis() as u64
        } else {
            0
        };
        let check = match outcome {
            Outcome::Residual { value, witness } => Check {
                id: id.to_string(),
                description: description.to_string(),
                paper_ref: paper_ref.to_string(),
                status: if value.is_finite() && value <= tol {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail
                },
                max_residual: Some(value),
                tolerance: Some(tol),
                witness,
                runtime_ms,
            },
            Outcome::Exceeds { value, witness } => Check {
                id: id.to_string(),
                description: description.to_string(),
                paper_ref: paper_ref.to_string(),
                status: if value > tol {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail
                },
                max_residual: Some(value),
                tolerance: Some(tol),
                witness,
                runtime_ms,
            },
            Outcome::Skip { note } => Check {
                id: id.to_string(),
                description: description.to_string(),
                paper_ref: paper_ref.to_string(),
                status: CheckStatus::Skip,
                max_residual: None,
                tolerance: None,
                witness: Value::String(note),
                runtime_ms,
            },
        };
        self.checks.push(check);
    }

    pub(crate) fn finish(self, scenario: &str) -> Report {
        Report::new(
            scenario,
            self.cfg.seed,
            self.cfg.identity_samples(),
            self.checks,
            self.warnings,
        )
    }
}

/// Deterministic parallel fold: runs `f` on per-index RNG streams and keeps
/// the strictly largest value (ties keep the earliest index). Returns
/// `(worst, witness, used, skipped)`.
pub(crate) fn parallel_worst(
    samples: usize,
    streams: &Streams,
    f: impl Fn(&mut ChaCha8Rng) -> Option<(f64, Value)> + Sync,
) -> (f64, Value, usize, usize) {
    let results: Vec<Option<(f64, Value)>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = streams.rng(i as u64);
            f(&mut rng)
        })
        .collect();
    let mut worst = f64::NEG_INFINITY;
    let mut witness = Value::Null;
    let mut used = 0usize;
    let mut skipped = 0usize;
    for r in results {
        match r {
            Some((v, w)) => {
                used += 1;
                if v > worst {
                    worst = v;
                    witness = w;
                }
            }
            None => skipped += 1,
        }
    }
    if used == 0 {
        worst = 0.0;
    }
    (worst, witness, used, skipped)
}

/// Runs every scenario in order.
pub fn run_all(cfg: &RunConfig) -> Result<Vec<Report>, HarnessError> {
    Ok(vec![
        run_theorem1(cfg)?,
        run_theorem2(cfg)?,
        run_lemma_a(cfg)?,
    ])
}
