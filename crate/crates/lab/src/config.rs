//! Experiment configuration files (TOML).
//!
//! ```toml
//! seed = 7
//! dimension = 2
//!
//! [experiment]
//! kind = "estimate_nu"
//! distribution = "{1: 1}"
//! direction = [0, 1]
//! schedule = [4, 8, 16]
//! replicates = 8
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::LabError;

pub const DEFAULT_QUANTUM: u64 = fppflow_core::DEFAULT_QUANTUM;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Replicate `r` uses seed `seed + r`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    /// Critical bond percolation parameter. Defaults to `1/2` in dimension 2
    /// and must be given otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pc: Option<String>,
    #[serde(default = "default_quantum")]
    pub quantum: u64,
    /// Vertex budget of every cluster exploration.
    #[serde(default = "default_budget")]
    pub budget: usize,
    pub experiment: Experiment,
}

fn default_dimension() -> usize {
    2
}

fn default_quantum() -> u64 {
    DEFAULT_QUANTUM
}

fn default_budget() -> usize {
    fppflow_core::percolation::DEFAULT_BUDGET
}

/// Replicate count, either shared by all scales or one per scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Replicates {
    Same(usize),
    PerScale(Vec<usize>),
}

impl Replicates {
    pub fn at(&self, i: usize, scales: usize) -> Result<usize, LabError> {
        match self {
            Replicates::Same(n) => Ok(*n),
            Replicates::PerScale(v) if v.len() == scales => Ok(v[i]),
            Replicates::PerScale(_) => {
                Err(LabError::Config("replicates list must match the schedule length".into()))
            }
        }
    }
}

/// Cylinder height as a function of the scale `p`, in real units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HeightRule {
    Fixed(u64),
    /// `"sqrt"` for `ceil(sqrt p)`, or `"pow:a/b"` for `ceil(p^(a/b))`.
    Named(String),
}

impl Default for HeightRule {
    fn default() -> Self {
        HeightRule::Named("sqrt".into())
    }
}

impl HeightRule {
    fn exponent(&self) -> Result<Option<(u32, u32)>, LabError> {
        match self {
            HeightRule::Fixed(_) => Ok(None),
            HeightRule::Named(s) if s == "sqrt" => Ok(Some((1, 2))),
            HeightRule::Named(s) => {
                let bad = || LabError::Config(format!("unknown height rule `{s}`"));
                let frac = s.strip_prefix("pow:").ok_or_else(bad)?;
                let (a, b) = frac.split_once('/').ok_or_else(bad)?;
                let a: u32 = a.trim().parse().map_err(|_| bad())?;
                let b: u32 = b.trim().parse().map_err(|_| bad())?;
                if b == 0 || a == 0 || a >= b {
                    return Err(LabError::Config(format!("height exponent {a}/{b} must lie in (0,1)")));
                }
                Ok(Some((a, b)))
            }
        }
    }

    /// `h(p)`, rounded up to an integer.
    pub fn height(&self, p: u64) -> Result<u64, LabError> {
        match self.exponent()? {
            None => match self {
                HeightRule::Fixed(h) if *h > 0 => Ok(*h),
                _ => Err(LabError::Config("height must be positive".into())),
            },
            Some((a, b)) => {
                // smallest integer h with h^b >= p^a
                let target = (p as u128).pow(a);
                let mut h = (p as f64).powf(a as f64 / b as f64).floor() as u128;
                h = h.saturating_sub(1);
                while h.checked_pow(b).map_or(true, |v| v < target) {
                    h += 1;
                }
                Ok(h.max(1) as u64)
            }
        }
    }

    /// A height rule is mild when `h(p)/log p` increases and `h(p)/p`
    /// decreases. Checked on the grid `p = 2^4 .. 2^40` after rounding.
    pub fn check_mild(&self) -> Result<(), LabError> {
        if self.exponent()?.is_none() {
            return Err(LabError::Config("a fixed height is not mild; use \"sqrt\" or \"pow:a/b\"".into()));
        }
        let grid: Vec<u64> = (4..=40).map(|k| 1u64 << k).collect();
        let mut prev: Option<(f64, f64)> = None;
        for &p in &grid {
            let h = self.height(p)? as f64;
            let (up, down) = (h / (p as f64).ln(), h / p as f64);
            if let Some((pu, pd)) = prev {
                if up <= pu || down >= pd {
                    return Err(LabError::Config(format!("height rule is not mild near p = {p}")));
                }
            }
            prev = Some((up, down));
        }
        Ok(())
    }
}

fn default_direction() -> Vec<i64> {
    vec![0, 1]
}

fn default_k0() -> String {
    "1".into()
}

/// One experiment; `kind` selects the variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// Rescaled cylinder flows `phi(pA, h(p)) / H^{d-1}(pA)` over a schedule.
    EstimateNu {
        distribution: String,
        #[serde(default = "default_direction")]
        direction: Vec<i64>,
        schedule: Vec<u64>,
        replicates: Replicates,
        #[serde(default)]
        height: HeightRule,
    },
    /// Flows under `G^K` for increasing `K`, shared seeds.
    TruncationLadder {
        distribution: String,
        levels: Vec<String>,
        #[serde(default = "default_direction")]
        direction: Vec<i64>,
        p: u64,
        replicates: usize,
        #[serde(default)]
        height: HeightRule,
        /// Tolerance of the plateau check, in combined half-widths.
        #[serde(default = "default_plateau")]
        plateau_halfwidths: f64,
    },
    /// Flows under `G_n` and `G`, shared seeds.
    Continuity {
        distribution: String,
        sequence: Sequence,
        #[serde(default = "default_direction")]
        direction: Vec<i64>,
        p: u64,
        replicates: usize,
        #[serde(default)]
        height: HeightRule,
        #[serde(default = "default_edge_sample")]
        edge_sample: usize,
    },
    /// Slab flows against cylinder flows.
    EstimateNuTilde {
        g: String,
        f: String,
        #[serde(default = "default_k0")]
        k0: String,
        #[serde(default = "default_direction")]
        direction: Vec<i64>,
        schedule: Vec<u64>,
        replicates: Replicates,
        #[serde(default)]
        height: HeightRule,
    },
    /// Weak triangle and Lipschitz inequalities between direction estimates.
    Convexity {
        distribution: String,
        triangles: Vec<[Vec<i64>; 3]>,
        p: u64,
        replicates: usize,
        #[serde(default)]
        height: HeightRule,
    },
    /// Sequential cluster sizes against independent copies.
    Domination {
        distribution: String,
        #[serde(default = "default_level")]
        level: String,
        /// Defaults to `(i, 0, ..)` for `i < 10`.
        #[serde(default)]
        anchors: Vec<Vec<i64>>,
        replicates: usize,
    },
    /// Max-flow against the brute-force oracle on small cylinders.
    OracleDuality {
        distribution: String,
        replicates: usize,
    },
    /// Slab-flow subadditivity over tilings.
    Subadditivity {
        g: String,
        f: String,
        #[serde(default = "default_k0")]
        k0: String,
        directions: Vec<Vec<i64>>,
        p: u64,
        /// Pieces per basis vector, one list per tiling.
        splits: Vec<Vec<u64>>,
        replicates: usize,
    },
    /// Heavy-edge surgery on truncated-law minimal cutsets.
    Surgery {
        distribution: String,
        k: String,
        #[serde(default = "default_k0")]
        k0: String,
        #[serde(default = "default_direction")]
        direction: Vec<i64>,
        p: u64,
        replicates: usize,
        #[serde(default)]
        height: HeightRule,
        #[serde(default = "default_event_rate")]
        min_event_rate: f64,
    },
    /// The zero-regime cutset built from cluster boundaries.
    ZeroRegime {
        distribution: String,
        #[serde(default = "default_k0")]
        k0: String,
        schedule: Vec<u64>,
        replicates: Replicates,
        #[serde(default)]
        height: HeightRule,
    },
    /// Cylinder flow against the sum of annulus flows.
    Annulus {
        distribution: String,
        p: u64,
        height: u64,
        l: i64,
        replicates: usize,
    },
    /// Box coarse-graining of minimal cutsets.
    Animal {
        distribution: String,
        #[serde(default = "default_direction")]
        direction: Vec<i64>,
        p: u64,
        l: i64,
        replicates: usize,
        #[serde(default)]
        height: HeightRule,
    },
}

fn default_plateau() -> f64 {
    2.0
}

fn default_edge_sample() -> usize {
    10_000
}

fn default_level() -> String {
    "0".into()
}

fn default_event_rate() -> f64 {
    0.95
}

/// The approximating laws of a continuity study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Sequence {
    /// `G_n = shift(G, 1/n)`.
    Shift(Vec<u64>),
    /// Explicit literals labelled by `n`.
    Laws(Vec<(u64, String)>),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::EstimateNu { .. } => "estimate_nu",
            Experiment::TruncationLadder { .. } => "truncation_ladder",
            Experiment::Continuity { .. } => "continuity",
            Experiment::EstimateNuTilde { .. } => "estimate_nu_tilde",
            Experiment::Convexity { .. } => "convexity",
            Experiment::Domination { .. } => "domination",
            Experiment::OracleDuality { .. } => "oracle_duality",
            Experiment::Subadditivity { .. } => "subadditivity",
            Experiment::Surgery { .. } => "surgery",
            Experiment::ZeroRegime { .. } => "zero_regime",
            Experiment::Annulus { .. } => "annulus",
            Experiment::Animal { .. } => "animal",
        }
    }
}

impl Experiment {
    /// Every distribution literal the experiment reads.
    pub fn literals(&self) -> Vec<&str> {
        match self {
            Experiment::EstimateNuTilde { g, f, .. } | Experiment::Subadditivity { g, f, .. } => vec![g, f],
            Experiment::Continuity { distribution, sequence, .. } => {
                let mut v = vec![distribution.as_str()];
                if let Sequence::Laws(list) = sequence {
                    v.extend(list.iter().map(|(_, l)| l.as_str()));
                }
                v
            }
            Experiment::EstimateNu { distribution, .. }
            | Experiment::TruncationLadder { distribution, .. }
            | Experiment::Convexity { distribution, .. }
            | Experiment::Domination { distribution, .. }
            | Experiment::OracleDuality { distribution, .. }
            | Experiment::Surgery { distribution, .. }
            | Experiment::ZeroRegime { distribution, .. }
            | Experiment::Annulus { distribution, .. }
            | Experiment::Animal { distribution, .. } => vec![distribution],
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config, LabError> {
        toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Config, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            let m: crate::report::Manifest =
                serde_json::from_str(&text).map_err(|e| LabError::Config(format!("manifest: {e}")))?;
            return Config::from_toml(&m.config);
        }
        Config::from_toml(&text)
    }

    /// Canonical TOML text; the manifest stores it and its digest.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }

    pub fn digest(&self) -> String {
        let d = Sha256::digest(self.to_toml().as_bytes());
        d.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal() {
        let c = Config::from_toml(
            "[experiment]\nkind = \"estimate_nu\"\ndistribution = \"{1: 1}\"\nschedule = [4, 8]\nreplicates = 2\n",
        )
        .unwrap();
        assert_eq!(c.dimension, 2);
        assert_eq!(c.experiment.kind(), "estimate_nu");
        let again = Config::from_toml(&c.to_toml()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.digest(), c.digest());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(Config::from_toml("[experiment]\nkind = \"annulus\"\nfoo = 1\n").is_err());
        assert!(Config::from_toml("bar = 1\n[experiment]\nkind = \"nope\"\n").is_err());
    }

    #[test]
    fn heights() {
        let s = HeightRule::default();
        assert_eq!(s.height(16).unwrap(), 4);
        assert_eq!(s.height(17).unwrap(), 5);
        assert_eq!(s.height(32).unwrap(), 6);
        assert_eq!(HeightRule::Named("pow:1/3".into()).height(27).unwrap(), 3);
        assert_eq!(HeightRule::Fixed(8).height(16).unwrap(), 8);
        s.check_mild().unwrap();
        HeightRule::Named("pow:2/3".into()).check_mild().unwrap();
        assert!(HeightRule::Fixed(8).check_mild().is_err());
        assert!(HeightRule::Named("pow:1/1".into()).height(4).is_err());
    }
}
