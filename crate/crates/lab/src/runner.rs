//! One experiment run, from configuration to artifacts and exit code.

use std::path::{Path, PathBuf};

use crate::config::Config;
use crate::error::LabError;
use crate::experiments::{run_experiment, Ctx};
use crate::literal;
use crate::report::{write_artifacts, Manifest, Report};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Directory relative table paths resolve against.
    pub base: PathBuf,
    /// Artifact directory; nothing is written when `None`.
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    /// Replay a single seed.
    pub only_seed: Option<u64>,
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub manifest: Option<Manifest>,
}

impl Outcome {
    /// 0 when every evaluated check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.report.passed() {
            0
        } else {
            1
        }
    }

    /// Human-readable summary, one line per check, then a replay hint per
    /// violating seed.
    pub fn summary(&self, config_path: Option<&Path>) -> String {
        let mut s = String::new();
        for c in &self.report.checks {
            let state = match c.passed {
                Some(true) => "pass",
                Some(false) => "FAIL",
                None => "skip",
            };
            s.push_str(&format!("{state} {} ({:?}): {}\n", c.name, c.kind, c.detail));
        }
        for n in &self.report.notes {
            s.push_str(&format!("note: {n}\n"));
        }
        let mut seeds: Vec<u64> = self.report.violations.iter().map(|v| v.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        let path = config_path.map_or("<config>".to_string(), |p| p.display().to_string());
        for v in &self.report.violations {
            s.push_str(&format!("violation {} seed={} scale={}: {}\n", v.check, v.seed, v.scale, v.detail));
        }
        for seed in seeds {
            s.push_str(&format!("fppflow replay --config {path} --seed {seed}\n"));
        }
        s
    }
}

pub fn run(cfg: Config, opts: &RunOptions) -> Result<Outcome, LabError> {
    let ctx = Ctx::new(cfg, opts.base.clone(), opts.workers, opts.only_seed)?;
    let report = run_experiment(&ctx)?;
    let manifest = match &opts.out {
        Some(dir) => {
            copy_tables(&ctx.cfg, &opts.base, dir)?;
            Some(write_artifacts(dir, &ctx.cfg, &report)?)
        }
        None => None,
    };
    Ok(Outcome { report, manifest })
}

/// Copy relative table files next to the artifacts so that a rerun from
/// `manifest.json` finds them.
fn copy_tables(cfg: &Config, base: &Path, out: &Path) -> Result<(), LabError> {
    for lit in cfg.experiment.literals() {
        for rel in literal::table_paths(lit) {
            let rel = Path::new(&rel);
            if rel.is_absolute() {
                continue;
            }
            let (from, to) = (base.join(rel), out.join(rel));
            if from.canonicalize().ok() == to.canonicalize().ok() {
                continue;
            }
            if let Some(parent) = to.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::copy(&from, &to)?;
        }
    }
    Ok(())
}
