//! Analytic-versus-simulated comparison reports.

use super::{Class, Discipline, Estimate, SimMetrics};
use crate::error::{ModelError, Result};
use crate::metrics::ClassMetrics;
use crate::model::GeneratorMode;

/// Largest accepted `|analytic - simulated| / standard error`.
pub const Z_THRESHOLD: f64 = 3.0;

/// Largest accepted relative gap between the two sides of Little's law.
pub const LITTLE_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// The discipline reproduces the generator mode's dynamics exactly.
    Matched(GeneratorMode),
    /// No exact analytic counterpart; z-scores only quantify the gap.
    ComparisonOnly(GeneratorMode),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricComparison {
    pub name: &'static str,
    pub analytic: Option<f64>,
    pub simulated: Option<f64>,
    pub std_error: Option<f64>,
    pub z: Option<f64>,
    pub pass: bool,
}

impl MetricComparison {
    fn new(name: &'static str, analytic: Option<f64>, sim: &Estimate) -> Self {
        let (z, pass) = match (analytic, sim.mean) {
            (None, None) => (None, true),
            (Some(a), Some(s)) => {
                let diff = (a - s).abs();
                let z = match sim.std_error {
                    Some(se) if se > 0.0 => Some(diff / se),
                    // A degenerate sample agrees only if it is exact.
                    _ if diff == 0.0 => Some(0.0),
                    Some(_) => Some(f64::INFINITY),
                    None => None,
                };
                (z, z.is_some_and(|z| z <= Z_THRESHOLD))
            }
            _ => (None, false),
        };
        Self {
            name,
            analytic,
            simulated: sim.mean,
            std_error: sim.std_error,
            z,
            pass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LittleCheck {
    pub class: Class,
    /// Largest relative gap over the replications (`None` without sojourns).
    pub worst_gap: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub pairing: Pairing,
    pub discipline: Discipline,
    pub metrics: Vec<MetricComparison>,
    pub little: [LittleCheck; 2],
    pub flow_conserved: bool,
}

impl ValidationReport {
    pub fn comparison_only(&self) -> bool {
        matches!(self.pairing, Pairing::ComparisonOnly(_))
    }

    pub fn metrics_pass(&self) -> bool {
        self.metrics.iter().all(|m| m.pass)
    }

    /// Every z-score within bounds and the simulation internally consistent.
    pub fn all_pass(&self) -> bool {
        self.metrics_pass() && self.little.iter().all(|l| l.pass) && self.flow_conserved
    }
}

/// Compares analytic metrics from `mode` with a simulation run.
///
/// A matched discipline paired with the other mode is an error; the
/// non-preemptive discipline is accepted against either mode but the report
/// is flagged comparison-only.
pub fn validate(analytic: &ClassMetrics, mode: GeneratorMode, simulated: &SimMetrics) -> Result<ValidationReport> {
    let discipline = simulated.config.discipline;
    let pairing = match discipline.analytic_counterpart() {
        Some(m) if m == mode => Pairing::Matched(mode),
        Some(m) => {
            return Err(ModelError::Pairing(format!(
                "discipline {discipline} matches generator mode {m}, not {mode}"
            )))
        }
        None => Pairing::ComparisonOnly(mode),
    };

    let analytic_values = [
        Some(analytic.l_rt),
        Some(analytic.l_nrt),
        Some(analytic.n_rt),
        Some(analytic.n_nrt),
        analytic.d_rt,
        analytic.d_nrt,
    ];
    let metrics = simulated
        .named()
        .into_iter()
        .zip(analytic_values)
        .map(|((name, est), a)| MetricComparison::new(name, a, est))
        .collect();

    let little = Class::BOTH.map(|class| {
        let worst_gap = simulated
            .replications
            .iter()
            .filter_map(|r| r.little_gap(class))
            .reduce(f64::max);
        LittleCheck {
            class,
            worst_gap,
            pass: worst_gap.is_none_or(|g| g <= LITTLE_TOLERANCE),
        }
    });

    let flow_conserved = simulated
        .replications
        .iter()
        .all(|r| Class::BOTH.iter().all(|&c| r.conserves_flow(c)));

    Ok(ValidationReport {
        pairing,
        discipline,
        metrics,
        little,
        flow_conserved,
    })
}
