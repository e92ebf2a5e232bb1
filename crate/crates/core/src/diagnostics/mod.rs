//! Experiment drivers. Each check runs a family of scenarios, fits the
//! constants the statements leave unspecified, and reports one record per
//! trial.

mod comparison;
mod convergence;
mod two_bump;
mod lemmas;
mod pressure;

pub use comparison::{comparison_check, ComparisonSetup};
pub use convergence::{convergence_study, ConvergenceReport, ConvergenceScenario};
pub use two_bump::{TwoBumpReport, TwoBumpScenario, SATURATION};
pub use lemmas::{
    expansion_bound_check, initial_motion_check, nucleation_timing_check, shrink_speed_check,
    ExpansionSetup, InitialMotionSetup, NucleationSetup, ShrinkSetup,
};
pub use pressure::{pressure_bound_check, PressureBoundSetup};

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LemmaId {
    PressureBound,
    NucleationTiming,
    ShrinkSpeed,
    ExpansionBound,
    InitialMotion,
    Comparison,
}

impl LemmaId {
    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::PressureBound => "pressure-bound",
            LemmaId::NucleationTiming => "nucleation-timing",
            LemmaId::ShrinkSpeed => "shrink-speed",
            LemmaId::ExpansionBound => "expansion-bound",
            LemmaId::InitialMotion => "initial-motion",
            LemmaId::Comparison => "comparison",
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// The scenario does not satisfy the statement's hypothesis; nothing
    /// was asserted.
    HypothesisNotMet,
}

/// One measurement: `measured` is compared against `bound` in the direction
/// the check documents.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub label: String,
    pub parameter: f64,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheckResult {
    pub lemma: LemmaId,
    pub outcome: Outcome,
    /// Fitted constants and summary measurements.
    pub fitted: Vec<(String, f64)>,
    pub trials: Vec<TrialRecord>,
}

impl LemmaCheckResult {
    fn from_trials(lemma: LemmaId, fitted: Vec<(String, f64)>, trials: Vec<TrialRecord>) -> Self {
        let outcome = if trials.iter().all(|t| t.pass) {
            Outcome::Pass
        } else {
            Outcome::Fail
        };
        LemmaCheckResult {
            lemma,
            outcome,
            fitted,
            trials,
        }
    }

    pub fn pass(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn fitted(&self, name: &str) -> Option<f64> {
        self.fitted.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }

    pub fn summary(&self) -> String {
        let verdict = match self.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::HypothesisNotMet => "HYPOTHESIS-NOT-MET",
        };
        let fitted: Vec<String> = self.fitted.iter().map(|(k, v)| format!("{k}={v:.4e}")).collect();
        let failed = self.trials.iter().filter(|t| !t.pass).count();
        format!(
            "{verdict} {} ({} trials, {failed} failed) {}",
            self.lemma,
            self.trials.len(),
            fitted.join(" ")
        )
    }
}

/// Least-squares slope of `y = k x` through the origin.
pub(crate) fn slope_through_origin(x: &[f64], y: &[f64]) -> f64 {
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    sxy / sxx
}

/// Least-squares slope of `ln y` against `ln x`.
pub(crate) fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits() {
        assert!((slope_through_origin(&[1.0, 2.0], &[3.0, 6.0]) - 3.0).abs() < 1e-15);
        let x = [1e-4, 1e-3, 1e-2];
        let y: Vec<f64> = x.iter().map(|t: &f64| 2.0 * t.powf(0.75)).collect();
        assert!((log_log_slope(&x, &y) - 0.75).abs() < 1e-12);
    }
}
