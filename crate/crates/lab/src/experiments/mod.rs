//! Monte-Carlo experiments and exact per-sample suites.
//!
//! Every experiment enumerates independent tasks keyed by `(scale, seed)`,
//! evaluates them on a worker pool and aggregates in task order, so the
//! artifacts do not depend on the number of workers.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use fppflow_core::{CutResult, Direction, Distribution, Prob, Total, Value};
use rayon::prelude::*;

use crate::config::{Config, Experiment};
use crate::error::LabError;
use crate::literal::parse_distribution;
use crate::records::SampleRecord;
use crate::report::{Report, Violation};

mod domination;
mod estimation;
mod exact;

pub use domination::domination;
pub use estimation::{continuity, convexity, estimate_nu, estimate_nu_tilde, truncation_ladder};
pub use exact::{animal, annulus, oracle_duality, small_problems, subadditivity, surgery, zero_regime};

/// Largest fraction of infinite samples a scale may have before the
/// experiment aborts.
pub const MAX_INFINITE_FRACTION: f64 = 0.10;

/// Shared state of one run.
pub struct Ctx {
    pub cfg: Config,
    /// Directory that relative table paths resolve against.
    pub base: PathBuf,
    pub quantum: u64,
    pub pc: Prob,
    pub budget: usize,
    /// Restrict every replicate loop to this seed (replay mode).
    pub only_seed: Option<u64>,
    pool: rayon::ThreadPool,
}

impl Ctx {
    pub fn new(cfg: Config, base: PathBuf, workers: Option<usize>, only_seed: Option<u64>) -> Result<Ctx, LabError> {
        let d = cfg.dimension;
        if !(2..=fppflow_core::lattice::MAX_DIM).contains(&d) {
            return Err(LabError::Config(format!("dimension {d} is outside 2..=6")));
        }
        if cfg.quantum == 0 {
            return Err(LabError::Config("quantum must be positive".into()));
        }
        let pc = match (&cfg.pc, d) {
            (Some(s), _) => Prob::parse(s).map_err(|e| LabError::Config(format!("pc `{s}`: {e}")))?,
            (None, 2) => Prob::new(1, 2).expect("1/2 is a probability"),
            (None, _) => {
                return Err(LabError::Config(format!("pc must be configured in dimension {d}")));
            }
        };
        if pc.is_zero() || pc == Prob::ONE {
            return Err(LabError::Config("pc must lie strictly between 0 and 1".into()));
        }
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = workers {
            builder = builder.num_threads(n.max(1));
        }
        let pool = builder.build().map_err(|e| LabError::Config(format!("worker pool: {e}")))?;
        Ok(Ctx { quantum: cfg.quantum, budget: cfg.budget, cfg, base, pc, only_seed, pool })
    }

    pub fn dimension(&self) -> usize {
        self.cfg.dimension
    }

    pub fn replay(&self) -> bool {
        self.only_seed.is_some()
    }

    /// Parse a law and check the standing hypothesis `G({inf}) < p_c(d)`.
    pub fn law(&self, literal: &str) -> Result<Arc<Distribution>, LabError> {
        let d = parse_distribution(literal, self.quantum, &self.base)?;
        if d.mass_at_infinity() >= self.pc {
            return Err(LabError::Hypothesis(format!(
                "mass at infinity {} of `{literal}` is not below p_c = {}",
                d.mass_at_infinity(),
                self.pc
            )));
        }
        Ok(Arc::new(d))
    }

    /// A level given as an exact number, in ticks.
    pub fn ticks(&self, literal: &str) -> Result<u64, LabError> {
        let v = Value::parse(literal).map_err(|e| LabError::Config(format!("level `{literal}`: {e}")))?;
        v.to_ticks(self.quantum).map_err(|e| LabError::Config(format!("level `{literal}`: {e}")))
    }

    pub fn direction(&self, w: &[i64]) -> Result<Direction, LabError> {
        if w.len() != self.dimension() {
            return Err(LabError::Config(format!(
                "direction {w:?} does not have dimension {}",
                self.dimension()
            )));
        }
        Direction::new(w).map_err(|e| LabError::Config(format!("direction {w:?}: {e}")))
    }

    /// Seeds `seed + r` for `r < n`, restricted in replay mode.
    pub fn seeds(&self, n: usize) -> Vec<u64> {
        (0..n as u64)
            .map(|r| self.cfg.seed.wrapping_add(r))
            .filter(|s| self.only_seed.map_or(true, |x| x == *s))
            .collect()
    }

    /// Ordered parallel map; the first error wins.
    pub fn par_map<I, T, F>(&self, items: &[I], f: F) -> Result<Vec<T>, LabError>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> Result<T, LabError> + Sync + Send,
    {
        self.pool.install(|| items.par_iter().map(&f).collect::<Vec<_>>()).into_iter().collect()
    }

    /// Value divided by the quantum and `area`; `None` when infinite.
    pub fn rescale(&self, t: Total, area: f64) -> Option<f64> {
        if t.is_infinite() {
            None
        } else {
            Some(t.to_f64(self.quantum) / area)
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn record(
        &self,
        functional: &str,
        variant: &str,
        spec: &str,
        scale: u64,
        seed: u64,
        value: Total,
        cardinality: u64,
        area: f64,
    ) -> SampleRecord {
        SampleRecord {
            experiment: self.cfg.experiment.kind().to_string(),
            functional: functional.to_string(),
            variant: variant.to_string(),
            spec: spec.to_string(),
            scale,
            seed,
            value: value.format(self.quantum),
            rescaled: self.rescale(value, area),
            cardinality,
            flags: BTreeMap::new(),
            extra: BTreeMap::new(),
        }
    }

    pub fn cut_record(
        &self,
        functional: &str,
        variant: &str,
        spec: &str,
        scale: u64,
        seed: u64,
        r: &CutResult,
        area: f64,
    ) -> SampleRecord {
        self.record(functional, variant, spec, scale, seed, r.value, r.cardinality as u64, area)
    }
}

pub(crate) fn violation(check: &str, seed: u64, scale: u64, detail: impl Into<String>) -> Violation {
    Violation { check: check.to_string(), seed, scale, detail: detail.into() }
}

/// Run the configured experiment.
pub fn run_experiment(ctx: &Ctx) -> Result<Report, LabError> {
    match &ctx.cfg.experiment {
        Experiment::EstimateNu { .. } => estimate_nu(ctx),
        Experiment::TruncationLadder { .. } => truncation_ladder(ctx),
        Experiment::Continuity { .. } => continuity(ctx),
        Experiment::EstimateNuTilde { .. } => estimate_nu_tilde(ctx),
        Experiment::Convexity { .. } => convexity(ctx),
        Experiment::Domination { .. } => domination(ctx),
        Experiment::OracleDuality { .. } => oracle_duality(ctx),
        Experiment::Subadditivity { .. } => subadditivity(ctx),
        Experiment::Surgery { .. } => surgery(ctx),
        Experiment::ZeroRegime { .. } => zero_regime(ctx),
        Experiment::Annulus { .. } => annulus(ctx),
        Experiment::Animal { .. } => animal(ctx),
    }
}
