//! Verification records and run configuration shared by the test harness and the CLI.

mod battery;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupSpec, SeriesWeight};
use crate::jets::ResidualConfig;

pub use battery::{
    analysis_records, assembly_records, jacobian_records, jacobian_sweep, jets_records, ladder_records, poincare_run, raabe_records,
    sym_records, tail_records, verify_records, PoincareRun, CATALOG_FUNCTIONS,
};

/// Settings of the Poincaré-series pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoincareConfig {
    /// Inline group; the CLI can replace it with a group file.
    pub group: GroupSpec,
    pub power: u32,
    pub weight: SeriesWeight,
    pub base_points: usize,
    /// Largest `|z|` of the sampled base points.
    pub radius: f64,
}

impl Default for PoincareConfig {
    fn default() -> Self {
        PoincareConfig {
            group: GroupSpec::cyclic(0.5, 12),
            power: 4,
            weight: SeriesWeight::OrbitDecay,
            base_points: 10,
            radius: 0.5,
        }
    }
}

/// Settings of the exact ladder diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderConfig {
    #[serde(rename = "N")]
    pub big_n: u64,
    pub n: u64,
    /// `p`, `p/q` or a decimal.
    pub alpha: String,
    pub max_m: u64,
    pub max_l: u64,
}

impl Default for LadderConfig {
    fn default() -> Self {
        LadderConfig { big_n: 3, n: 1, alpha: "0".into(), max_m: 200, max_l: 10_000 }
    }
}

/// Everything that determines a run; a fixed config and seed give
/// byte-identical reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Restricts the dimensions of the identity suite and the jet checks.
    pub dims: Option<Vec<usize>>,
    /// Samples per dimension for the ball identities.
    pub ball_samples: usize,
    /// Samples per dimension for the frame identities.
    pub frame_samples: usize,
    /// Base points per function and dimension for the jet checks.
    pub jet_base_points: usize,
    /// Largest `|I|` in the compatibility checks.
    pub max_degree: usize,
    /// Function specs for the jet checks.
    pub functions: Vec<String>,
    pub residual: ResidualConfig,
    /// Samples per dimension for the Jacobian inequality.
    pub jacobian_samples: usize,
    /// Word length of the random groups in the Jacobian sweep.
    pub jacobian_word_len: usize,
    pub poincare: PoincareConfig,
    pub ladder: LadderConfig,
    /// Samples for the Monte-Carlo moment check.
    pub moment_samples: usize,
    pub tol_overrides: BTreeMap<String, f64>,
    /// Where to write the report; not part of the config hash.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            dims: None,
            ball_samples: 10_000,
            frame_samples: 1000,
            jet_base_points: 20,
            max_degree: 4,
            functions: CATALOG_FUNCTIONS.iter().map(|s| s.to_string()).collect(),
            residual: ResidualConfig::default(),
            jacobian_samples: 10_000,
            jacobian_word_len: 6,
            poincare: PoincareConfig::default(),
            ladder: LadderConfig::default(),
            moment_samples: 10_000_000,
            tol_overrides: BTreeMap::new(),
            out: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("run config: {e}")))
    }

    /// Reject settings the checks cannot run with.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(what.to_string()));
        if self.jet_base_points < 3 || self.poincare.base_points < 3 {
            return bad("vanishing-order detection needs at least 3 base points");
        }
        if self.max_degree == 0 {
            return bad("max_degree must be at least 1");
        }
        if self.ball_samples == 0 || self.frame_samples == 0 || self.jacobian_samples == 0 || self.moment_samples == 0 {
            return bad("sample counts must be positive");
        }
        if !(self.poincare.radius > 0.0 && self.poincare.radius < 1.0) {
            return bad("poincare.radius must lie in (0, 1)");
        }
        if self.ladder.max_l < 100 {
            return bad("ladder.max_l must be at least 100");
        }
        Ok(())
    }

    /// FNV-1a hash of the canonical JSON without the output path.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        let text = serde_json::to_string(&c).expect("config serializes");
        let h = text.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3));
        format!("{h:016x}")
    }
}

/// One check: a measured quantity against its tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
    /// Set when the measured value must exceed `tol` instead of staying below it.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub lower_bound: bool,
}

impl Record {
    /// Passes when `value < tol`; NaN fails.
    pub fn below(id: impl Into<String>, samples: usize, value: f64, tol: f64) -> Self {
        let mut r = Record { id: id.into(), samples, max_residual: value, tol, pass: false, lower_bound: false };
        r.judge();
        r
    }

    /// Passes when `value > tol`.
    pub fn above(id: impl Into<String>, samples: usize, value: f64, tol: f64) -> Self {
        let mut r = Record { id: id.into(), samples, max_residual: value, tol, pass: false, lower_bound: true };
        r.judge();
        r
    }

    /// Exact check: passes when there are no mismatches.
    pub fn exact(id: impl Into<String>, samples: usize, mismatches: usize) -> Self {
        Record { id: id.into(), samples, max_residual: mismatches as f64, tol: 0.0, pass: mismatches == 0, lower_bound: false }
    }

    fn judge(&mut self) {
        self.pass = if self.lower_bound { self.max_residual > self.tol } else { self.max_residual < self.tol };
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
}

/// Records of one run. `pass` holds iff every record passes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub pass: bool,
    pub records: Vec<Record>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub env: Environment,
    /// Command-specific output such as Ψ samples.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artifact: Option<serde_json::Value>,
}

impl Report {
    /// Apply tolerance overrides and assemble. An override naming no record
    /// of this run is an error.
    pub fn new(command: &str, mut records: Vec<Record>, cfg: &RunConfig) -> Result<Self> {
        for (id, tol) in &cfg.tol_overrides {
            let mut hit = false;
            for r in records.iter_mut().filter(|r| &r.id == id) {
                r.tol = *tol;
                r.judge();
                hit = true;
            }
            if !hit {
                return Err(Error::UnknownIdentity(id.clone()));
            }
        }
        Ok(Report {
            command: command.to_string(),
            pass: records.iter().all(|r| r.pass),
            records,
            warnings: Vec::new(),
            env: Environment { version: env!("CARGO_PKG_VERSION").to_string(), seed: cfg.seed, config_hash: cfg.hash() },
            artifact: None,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failed(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_rejudge() {
        let mut cfg = RunConfig::default();
        let recs = vec![Record::below("A", 1, 1e-12, 1e-10), Record::above("B", 1, 0.5, 1e-6)];
        assert!(Report::new("t", recs.clone(), &cfg).unwrap().pass);
        cfg.tol_overrides.insert("A".into(), 1e-30);
        let r = Report::new("t", recs.clone(), &cfg).unwrap();
        assert!(!r.pass);
        assert_eq!(r.failed().next().unwrap().id, "A");
        cfg.tol_overrides.insert("C".into(), 1.0);
        assert!(matches!(Report::new("t", recs, &cfg), Err(Error::UnknownIdentity(_))));
    }

    #[test]
    fn nan_fails() {
        assert!(!Record::below("x", 1, f64::NAN, 1.0).pass);
        assert!(!Record::above("x", 1, f64::NAN, 1.0).pass);
    }

    #[test]
    fn config_roundtrip_and_hash() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        let back = RunConfig::from_json(&text).unwrap();
        assert_eq!(back, cfg);
        let mut moved = cfg.clone();
        moved.out = Some("elsewhere.json".into());
        assert_eq!(moved.hash(), cfg.hash());
        let mut reseeded = cfg.clone();
        reseeded.seed = 7;
        assert_ne!(reseeded.hash(), cfg.hash());
        assert!(RunConfig::from_json(r#"{"sed": 1}"#).is_err());
        assert_eq!(RunConfig::from_json(r#"{"seed": 5}"#).unwrap().seed, 5);
    }
}
