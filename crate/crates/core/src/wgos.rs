//! Weighted Grade of Service (WGoS) cost and the threshold sweep built on it.
//!
//! The cost of a configuration is the arrival-rate-weighted mix of each
//! class's loss penalty and delay penalty:
//!
//! ```text
//! gamma = lr / (lr + ln) * [CL_rt L_rt + (1 - L_rt) CD_rt D_rt]
//!       + ln / (lr + ln) * [CL_nrt L_nrt + (1 - L_nrt) CD_nrt D_nrt]
//! ```
//!
//! Smaller is better.

use rayon::prelude::*;

use crate::error::{ModelError, Result};
use crate::metrics::ClassMetrics;
use crate::model::{BufferConfig, GeneratorMode, TrafficParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostWeights {
    pub cl_rt: f64,
    pub cl_nrt: f64,
    pub cd_rt: f64,
    pub cd_nrt: f64,
}

impl CostWeights {
    pub fn new(cl_rt: f64, cl_nrt: f64, cd_rt: f64, cd_nrt: f64) -> Result<Self> {
        let w = Self {
            cl_rt,
            cl_nrt,
            cd_rt,
            cd_nrt,
        };
        for (name, v) in [("cl_rt", cl_rt), ("cl_nrt", cl_nrt), ("cd_rt", cd_rt), ("cd_nrt", cd_nrt)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ModelError::Config(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(w)
    }

    /// All four weights multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            cl_rt: self.cl_rt * factor,
            cl_nrt: self.cl_nrt * factor,
            cd_rt: self.cd_rt * factor,
            cd_nrt: self.cd_nrt * factor,
        }
    }
}

/// The scalar cost together with the two bracketed per-class terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WGoSResult {
    pub gamma: f64,
    pub rt_term: f64,
    pub nrt_term: f64,
    /// `lambda_rt / (lambda_rt + lambda_nrt)`; the NRT weight is `1 - rt_weight`.
    pub rt_weight: f64,
}

impl WGoSResult {
    /// Recombines the stored terms.
    pub fn recombined(&self) -> f64 {
        self.rt_weight * self.rt_term + (1.0 - self.rt_weight) * self.nrt_term
    }
}

pub fn wgos_gamma(metrics: &ClassMetrics, params: &TrafficParams, costs: &CostWeights) -> Result<WGoSResult> {
    let total = params.total_arrival_rate();
    if !(total > 0.0) {
        return Err(ModelError::DegenerateTraffic);
    }
    let rt_term = class_term(
        "RT",
        params.lambda_rt,
        metrics.l_rt,
        metrics.d_rt,
        costs.cl_rt,
        costs.cd_rt,
    )?;
    let nrt_term = class_term(
        "NRT",
        params.lambda_nrt,
        metrics.l_nrt,
        metrics.d_nrt,
        costs.cl_nrt,
        costs.cd_nrt,
    )?;
    let rt_weight = params.lambda_rt / total;
    let nrt_weight = params.lambda_nrt / total;
    Ok(WGoSResult {
        gamma: rt_weight * rt_term + nrt_weight * nrt_term,
        rt_term,
        nrt_term,
        rt_weight,
    })
}

fn class_term(
    class: &'static str,
    lambda: f64,
    loss: f64,
    delay: Option<f64>,
    loss_cost: f64,
    delay_cost: f64,
) -> Result<f64> {
    if lambda == 0.0 {
        // Carries zero weight in gamma.
        return Ok(0.0);
    }
    let delay = delay.ok_or(ModelError::UndefinedDelay(class))?;
    Ok(loss_cost * loss + (1.0 - loss) * delay_cost * delay)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub r: usize,
    pub n: usize,
    pub metrics: ClassMetrics,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// One row per threshold, in ascending `R`.
    pub rows: Vec<SweepRow>,
    /// Threshold with minimal gamma; ties go to the smallest `R`.
    pub r_star: usize,
    pub mode: GeneratorMode,
}

impl SweepResult {
    pub fn best(&self) -> &SweepRow {
        self.rows
            .iter()
            .find(|row| row.r == self.r_star)
            .expect("r_star is one of the rows")
    }
}

/// Solves every `(R, N = total - R)` split and returns its class metrics,
/// ordered by ascending `R`.
pub fn sweep_metrics(
    params: &TrafficParams,
    total: usize,
    r_values: &[usize],
    mode: GeneratorMode,
) -> Result<Vec<(BufferConfig, ClassMetrics)>> {
    params.validate()?;
    if r_values.is_empty() {
        return Err(ModelError::Config("threshold range is empty".into()));
    }
    let mut rs = r_values.to_vec();
    rs.sort_unstable();
    rs.dedup();
    rs.par_iter()
        .map(|&r| {
            let annotate = |source| ModelError::AtThreshold {
                r,
                source: Box::new(source),
            };
            let config = BufferConfig::from_total(total, r).map_err(annotate)?;
            let metrics = crate::analyze(params, config, mode).map_err(annotate)?;
            Ok((config, metrics))
        })
        .collect()
}

/// Evaluates gamma at every threshold in `r_values` and locates the minimum.
pub fn sweep_threshold(
    params: &TrafficParams,
    total: usize,
    r_values: &[usize],
    costs: &CostWeights,
    mode: GeneratorMode,
) -> Result<SweepResult> {
    let rows = sweep_metrics(params, total, r_values, mode)?
        .into_iter()
        .map(|(config, metrics)| {
            let r = config.r_threshold();
            let w = wgos_gamma(&metrics, params, costs).map_err(|source| ModelError::AtThreshold {
                r,
                source: Box::new(source),
            })?;
            Ok(SweepRow {
                r,
                n: config.n_capacity(),
                metrics,
                gamma: w.gamma,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // Strict comparison keeps the first (smallest R) of tied minima.
    let r_star = rows
        .iter()
        .fold(None::<&SweepRow>, |best, row| match best {
            Some(b) if b.gamma <= row.gamma => Some(b),
            _ => Some(row),
        })
        .map(|row| row.r)
        .expect("sweep has at least one row");

    Ok(SweepResult { rows, r_star, mode })
}
