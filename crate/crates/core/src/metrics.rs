//! Per-class QoS measures derived from a stationary distribution.

use crate::ctmc::SteadyState;
use crate::model::TrafficParams;

/// Mean occupancy, loss probability and mean sojourn time of each class.
///
/// Delays are `None` when the class has no admitted throughput, i.e.
/// `lambda * (1 - L) == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub n_rt: f64,
    pub n_nrt: f64,
    pub l_rt: f64,
    pub l_nrt: f64,
    pub d_rt: Option<f64>,
    pub d_nrt: Option<f64>,
}

impl ClassMetrics {
    /// Evaluates all six measures.
    pub fn compute(ss: &SteadyState, params: &TrafficParams) -> Self {
        let (n_rt, n_nrt) = mean_counts(ss);
        let (l_rt, l_nrt) = loss_probabilities(ss);
        let (d_rt, d_nrt) = mean_delays(ss, params);
        Self {
            n_rt,
            n_nrt,
            l_rt,
            l_nrt,
            d_rt,
            d_nrt,
        }
    }

    /// The metrics with the two classes' roles exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            n_rt: self.n_nrt,
            n_nrt: self.n_rt,
            l_rt: self.l_nrt,
            l_nrt: self.l_rt,
            d_rt: self.d_nrt,
            d_nrt: self.d_rt,
        }
    }
}

/// Mean number of RT and NRT customers in the system.
pub fn mean_counts(ss: &SteadyState) -> (f64, f64) {
    ss.iter().fold((0.0, 0.0), |(rt, nrt), (s, p)| {
        (rt + s.i as f64 * p, nrt + s.j as f64 * p)
    })
}

/// Probability mass on the full-RT row `i = R` and the full-NRT column `j = N`.
pub fn loss_probabilities(ss: &SteadyState) -> (f64, f64) {
    let cfg = ss.space().config();
    let (r, n) = (cfg.r_threshold(), cfg.n_capacity());
    ss.iter().fold((0.0, 0.0), |(rt, nrt), (s, p)| {
        (
            if s.i == r { rt + p } else { rt },
            if s.j == n { nrt + p } else { nrt },
        )
    })
}

/// Mean sojourn times by Little's law, `N / (lambda (1 - L))` per class.
///
/// `1 - L` is summed directly over the non-blocking states rather than
/// subtracted, so a nearly saturated class keeps a finite delay.
pub fn mean_delays(ss: &SteadyState, params: &TrafficParams) -> (Option<f64>, Option<f64>) {
    let (n_rt, n_nrt) = mean_counts(ss);
    let (a_rt, a_nrt) = admission_probabilities(ss);
    (
        little_delay(n_rt, params.lambda_rt, a_rt),
        little_delay(n_nrt, params.lambda_nrt, a_nrt),
    )
}

/// Probability mass off the row `i = R` and off the column `j = N`.
fn admission_probabilities(ss: &SteadyState) -> (f64, f64) {
    let cfg = ss.space().config();
    let (r, n) = (cfg.r_threshold(), cfg.n_capacity());
    ss.iter().fold((0.0, 0.0), |(rt, nrt), (s, p)| {
        (
            if s.i < r { rt + p } else { rt },
            if s.j < n { nrt + p } else { nrt },
        )
    })
}

fn little_delay(mean_count: f64, lambda: f64, admitted: f64) -> Option<f64> {
    let throughput = lambda * admitted;
    (throughput > 0.0).then(|| mean_count / throughput)
}
