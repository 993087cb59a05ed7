//! The verification suite: fifteen numbered criteria covering exact
//! identities, law agreement between generators, martingale behaviour,
//! profile asymptotics, tilted models and reproducibility.
//!
//! Thresholds and scales live in `verify.conf` (embedded, overridable),
//! not in code. Every criterion is a pure function of the configuration:
//! re-running one with the same configuration reproduces its report byte
//! for byte.

use anyhow::Result;

use crate::config::KeyValues;
use crate::report::{CriterionReport, SuiteReport};

mod depth_laws;
mod exact_checks;
mod martingale_runs;
mod profile_checks;
mod repro;
mod tilted_checks;

/// The embedded default threshold file.
pub const DEFAULT_CONF: &str = include_str!("verify.conf");

/// Parsed verification configuration.
#[derive(Clone, Debug)]
pub struct AcceptanceConfig {
    kv: KeyValues,
    pub alpha: f64,
    pub seed: u64,
}

impl AcceptanceConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        let kv = KeyValues::parse(text)?;
        Ok(AcceptanceConfig {
            alpha: kv.f64("alpha")?,
            seed: kv.u64("seed")?,
            kv,
        })
    }

    pub fn default_config() -> Self {
        Self::from_text(DEFAULT_CONF).expect("embedded config parses")
    }

    /// Default configuration with a different seed.
    pub fn with_seed(seed: u64) -> Self {
        let mut cfg = Self::default_config();
        cfg.seed = seed;
        cfg
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        self.kv.f64(key)
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.kv.usize(key)
    }

    /// Stream seed for part `part` of criterion `id`; criteria never share
    /// streams.
    pub fn sub_seed(&self, id: u32, part: u64) -> u64 {
        self.seed ^ (id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ part.wrapping_mul(0x100_0193)
    }
}

/// Which criteria to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Exact identities and enumeration oracles only (seconds).
    Fast,
    /// Everything.
    All,
}

impl Suite {
    pub fn criterion_ids(self) -> Vec<u32> {
        match self {
            Suite::Fast => vec![1, 2, 5],
            Suite::All => (1..=15).collect(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Fast => "fast",
            Suite::All => "all",
        }
    }
}

/// Runs one criterion by number.
pub fn run_criterion(id: u32, cfg: &AcceptanceConfig) -> Result<CriterionReport> {
    match id {
        1 => exact_checks::c01_critical_constants(cfg),
        2 => exact_checks::c02_one_step_means(cfg),
        3 => martingale_runs::c03_factorisation_residual(cfg),
        4 => depth_laws::c04_shape_law_agreement(cfg),
        5 => exact_checks::c05_exact_profile(cfg),
        6 => profile_checks::c06_profile_window(cfg),
        7 => profile_checks::c07_level_count_estimate(cfg),
        8 => martingale_runs::c08_depth_derivative_limit(cfg),
        9 => martingale_runs::c09_degenerate_limits(cfg),
        10 => depth_laws::c10_insertion_depth(cfg),
        11 => tilted_checks::c11_spine_tilting(cfg),
        12 => tilted_checks::c12_tilted_counts(cfg),
        13 => depth_laws::c13_exponential_and_joint_limits(cfg),
        14 => profile_checks::c14_deep_tail_rate(cfg),
        15 => repro::c15_reproducibility(cfg),
        other => anyhow::bail!("no criterion numbered {other}"),
    }
}

/// Runs a suite, returning the ordered criterion reports.
pub fn run_suite(suite: Suite, cfg: &AcceptanceConfig) -> Result<SuiteReport> {
    let mut criteria = Vec::new();
    for id in suite.criterion_ids() {
        criteria.push(run_criterion(id, cfg)?);
    }
    Ok(SuiteReport::new(suite.name(), cfg.seed, criteria))
}
