//! Reproducibility: repeated runs with the same configuration must
//! serialize to identical bytes.

use anyhow::Result;

use super::{AcceptanceConfig, depth_laws, exact_checks, martingale_runs};
use crate::report::{CheckReport, CriterionReport};

pub fn c15_reproducibility(cfg: &AcceptanceConfig) -> Result<CriterionReport> {
    type Criterion = fn(&AcceptanceConfig) -> Result<CriterionReport>;
    // one exact criterion and two Monte Carlo criteria (one of them
    // replicate-parallel with large sample counts), each run twice
    let runs: [(&str, Criterion); 3] = [
        ("constants", exact_checks::c01_critical_constants),
        ("shape-law agreement", depth_laws::c04_shape_law_agreement),
        ("depth-derivative limit", martingale_runs::c08_depth_derivative_limit),
    ];
    let mut checks = Vec::new();
    for (name, f) in runs {
        let a = serde_json::to_string(&f(cfg)?).expect("report serializes");
        let b = serde_json::to_string(&f(cfg)?).expect("report serializes");
        checks.push(
            CheckReport::exact(format!("repeated `{name}` reports are byte-identical"), a == b)
                .with_detail(format!("{} bytes per report", a.len())),
        );
    }
    Ok(CriterionReport::new(
        15,
        "bitwise reproducibility of repeated runs",
        checks,
    ))
}
