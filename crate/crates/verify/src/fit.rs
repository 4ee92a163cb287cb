//! Fitting the smallest admissible constant for one statement.

use serde::{Deserialize, Serialize};

use crate::reports::InequalityReport;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Fit {
    /// `K̂` and the grid point attaining it.
    Fitted { k: f64, at: String },
    /// No report had `rhs_without_K` above the floor.
    Vacuous,
}

impl Fit {
    pub fn value(&self) -> Option<f64> {
        match self {
            Fit::Fitted { k, .. } => Some(*k),
            Fit::Vacuous => None,
        }
    }
}

/// `lhs - tail` for one report.
pub fn excess(r: &InequalityReport) -> f64 {
    r.lhs - r.tail
}

/// A nonzero excess over a vanishing right side.
pub fn is_anomaly(r: &InequalityReport, rhs_floor: f64, lhs_floor: f64) -> bool {
    excess(r) > lhs_floor && r.rhs_without_k <= rhs_floor
}

/// `K̂ = max (lhs - tail)/rhs_without_K` over reports with `rhs_without_K > rhs_floor`.
/// Ties keep the first report, so the result does not depend on anything but order of the input.
pub fn fit_constant<'a>(reports: impl IntoIterator<Item = &'a InequalityReport>, rhs_floor: f64) -> Fit {
    let mut best: Option<(f64, &InequalityReport)> = None;
    for r in reports {
        if r.rhs_without_k <= rhs_floor {
            continue;
        }
        let ratio = excess(r) / r.rhs_without_k;
        if best.map_or(true, |(b, _)| ratio > b) {
            best = Some((ratio, r));
        }
    }
    match best {
        Some((k, r)) => Fit::Fitted { k, at: r.label() },
        None => Fit::Vacuous,
    }
}
