//! Event-driven simulation of the partitioned two-class buffer.
//!
//! Each replication starts from the empty system, runs for `warmup +
//! horizon` time units and collects statistics only over the final
//! `horizon`. Replication `k` draws from a Xoshiro256++ generator seeded
//! (through `seed_from_u64`) with the `(k + 1)`-th output of a SplitMix64
//! sequence started at `master_seed`, so every number in a [`SimMetrics`]
//! is a pure function of its [`SimConfig`].

mod engine;
mod validate;

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;

use crate::error::{ModelError, Result};
use crate::model::{BufferConfig, GeneratorMode, TrafficParams};

pub use engine::run_replication;
pub use validate::{validate, LittleCheck, MetricComparison, Pairing, ValidationReport, Z_THRESHOLD};

/// Default master seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 0x5EED_2007;
pub const DEFAULT_REPLICATIONS: usize = 20;

/// Traffic class index used for the per-class arrays below.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Class {
    Rt = 0,
    Nrt = 1,
}

impl Class {
    pub const BOTH: [Class; 2] = [Class::Rt, Class::Nrt];

    pub fn idx(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Class::Rt => "RT",
            Class::Nrt => "NRT",
        }
    }
}

/// How the single server picks among waiting customers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Discipline {
    /// A started service always completes; RT is chosen first at service starts.
    NonPreemptivePriority,
    /// An arriving RT customer interrupts NRT service, which later resumes.
    PreemptiveResume,
    /// Each class is served at its own rate whenever present.
    IndependentClassService,
}

impl Discipline {
    pub const ALL: [Discipline; 3] = [
        Discipline::NonPreemptivePriority,
        Discipline::PreemptiveResume,
        Discipline::IndependentClassService,
    ];

    /// The generator mode with the same Markovian dynamics, if any.
    pub fn analytic_counterpart(&self) -> Option<GeneratorMode> {
        match self {
            Discipline::NonPreemptivePriority => None,
            Discipline::PreemptiveResume => Some(GeneratorMode::StrictPriority),
            Discipline::IndependentClassService => Some(GeneratorMode::PaperLiteral),
        }
    }

    /// The discipline whose dynamics match `mode` exactly.
    pub fn matching(mode: GeneratorMode) -> Self {
        match mode {
            GeneratorMode::PaperLiteral => Discipline::IndependentClassService,
            GeneratorMode::StrictPriority => Discipline::PreemptiveResume,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Discipline::NonPreemptivePriority => "nonpreemptive",
            Discipline::PreemptiveResume => "preemptive",
            Discipline::IndependentClassService => "independent",
        }
    }
}

impl fmt::Display for Discipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Discipline {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nonpreemptive" | "non-preemptive" => Ok(Discipline::NonPreemptivePriority),
            "preemptive" | "preemptive-resume" => Ok(Discipline::PreemptiveResume),
            "independent" => Ok(Discipline::IndependentClassService),
            other => Err(ModelError::Config(format!(
                "unknown discipline '{other}' (expected nonpreemptive, preemptive or independent)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: TrafficParams,
    pub buffer: BufferConfig,
    pub discipline: Discipline,
    pub warmup: f64,
    pub horizon: f64,
    pub replications: usize,
    pub master_seed: u64,
}

impl SimConfig {
    /// Default run length: `10^6 / (mu_rt + mu_nrt)` measured time units after
    /// a warmup of 10% of that, over 20 replications.
    pub fn new(params: TrafficParams, buffer: BufferConfig, discipline: Discipline) -> Self {
        let horizon = default_horizon(&params);
        Self {
            params,
            buffer,
            discipline,
            warmup: 0.1 * horizon,
            horizon,
            replications: DEFAULT_REPLICATIONS,
            master_seed: DEFAULT_SEED,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(ModelError::Config(format!(
                "horizon must be finite and > 0, got {}",
                self.horizon
            )));
        }
        if !(self.warmup.is_finite() && self.warmup >= 0.0) {
            return Err(ModelError::Config(format!(
                "warmup must be finite and >= 0, got {}",
                self.warmup
            )));
        }
        if self.replications < 1 {
            return Err(ModelError::Config("replications must be >= 1".into()));
        }
        Ok(())
    }

    /// Seed handed to replication `index`.
    pub fn replication_seed(&self, index: usize) -> u64 {
        let mut mix = SplitMix64::seed_from_u64(self.master_seed);
        let mut seed = mix.next_u64();
        for _ in 0..index {
            seed = mix.next_u64();
        }
        seed
    }
}

pub fn default_horizon(params: &TrafficParams) -> f64 {
    1e6 / (params.mu_rt + params.mu_nrt)
}

/// Raw tallies and measurement-window statistics of one replication.
///
/// The `arrivals`, `losses`, `departures` and `in_system_at_end` counters
/// cover the whole run from time zero; everything else covers only the
/// measurement window `[warmup, warmup + horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    pub seed: u64,
    pub arrivals: [u64; 2],
    pub losses: [u64; 2],
    pub departures: [u64; 2],
    pub in_system_at_end: [u64; 2],
    pub max_occupancy: [usize; 2],
    pub window_arrivals: [u64; 2],
    pub window_losses: [u64; 2],
    /// Customers that arrived in the window and departed before its end.
    pub delay_count: [u64; 2],
    pub delay_sum: [f64; 2],
    /// Integral of the class occupancy over the window.
    pub occupancy_area: [f64; 2],
    pub window: f64,
}

impl ReplicationRecord {
    pub fn loss(&self, class: Class) -> Option<f64> {
        let c = class.idx();
        (self.window_arrivals[c] > 0).then(|| self.window_losses[c] as f64 / self.window_arrivals[c] as f64)
    }

    pub fn delay(&self, class: Class) -> Option<f64> {
        let c = class.idx();
        (self.delay_count[c] > 0).then(|| self.delay_sum[c] / self.delay_count[c] as f64)
    }

    /// Time-average number of customers of `class` over the window.
    pub fn mean_count(&self, class: Class) -> f64 {
        self.occupancy_area[class.idx()] / self.window
    }

    /// Admitted arrivals per unit time over the window.
    pub fn admitted_rate(&self, class: Class) -> f64 {
        let c = class.idx();
        (self.window_arrivals[c] - self.window_losses[c]) as f64 / self.window
    }

    /// `arrivals == losses + departures + in_system_at_end` for `class`.
    pub fn conserves_flow(&self, class: Class) -> bool {
        let c = class.idx();
        self.arrivals[c] == self.losses[c] + self.departures[c] + self.in_system_at_end[c]
    }

    /// Relative gap `|L - lambda_adm W| / L` between the two sides of
    /// Little's law, or `None` when the class saw no completed sojourns.
    pub fn little_gap(&self, class: Class) -> Option<f64> {
        let w = self.delay(class)?;
        let l = self.mean_count(class);
        let rhs = self.admitted_rate(class) * w;
        Some(if l > 0.0 { (l - rhs).abs() / l } else { rhs.abs() })
    }
}

/// Mean over replications with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: Option<f64>,
    /// Sample standard deviation over `sqrt(count)`; needs two samples.
    pub std_error: Option<f64>,
    /// Replications that produced a defined value.
    pub count: usize,
}

impl Estimate {
    pub fn from_samples(samples: impl IntoIterator<Item = Option<f64>>) -> Self {
        let values: Vec<f64> = samples.into_iter().flatten().collect();
        let count = values.len();
        if count == 0 {
            return Self {
                mean: None,
                std_error: None,
                count,
            };
        }
        let n = count as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std_error = (count >= 2).then(|| {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        });
        Self {
            mean: Some(mean),
            std_error,
            count,
        }
    }
}

/// Aggregated estimates of the six class metrics plus summed raw counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SimMetrics {
    pub config: SimConfig,
    pub n_rt: Estimate,
    pub n_nrt: Estimate,
    pub l_rt: Estimate,
    pub l_nrt: Estimate,
    pub d_rt: Estimate,
    pub d_nrt: Estimate,
    pub arrivals: [u64; 2],
    pub losses: [u64; 2],
    pub departures: [u64; 2],
    pub replications: Vec<ReplicationRecord>,
}

impl SimMetrics {
    fn aggregate(config: SimConfig, replications: Vec<ReplicationRecord>) -> Self {
        let est = |f: &dyn Fn(&ReplicationRecord) -> Option<f64>| {
            Estimate::from_samples(replications.iter().map(f))
        };
        let sum = |f: &dyn Fn(&ReplicationRecord) -> [u64; 2]| {
            replications.iter().fold([0u64; 2], |acc, r| {
                let v = f(r);
                [acc[0] + v[0], acc[1] + v[1]]
            })
        };
        Self {
            config,
            n_rt: est(&|r| Some(r.mean_count(Class::Rt))),
            n_nrt: est(&|r| Some(r.mean_count(Class::Nrt))),
            l_rt: est(&|r| r.loss(Class::Rt)),
            l_nrt: est(&|r| r.loss(Class::Nrt)),
            d_rt: est(&|r| r.delay(Class::Rt)),
            d_nrt: est(&|r| r.delay(Class::Nrt)),
            arrivals: sum(&|r| r.arrivals),
            losses: sum(&|r| r.losses),
            departures: sum(&|r| r.departures),
            replications,
        }
    }

    /// The six estimates paired with their CSV names, in report order.
    pub fn named(&self) -> [(&'static str, &Estimate); 6] {
        [
            ("L_rt", &self.l_rt),
            ("L_nrt", &self.l_nrt),
            ("N_rt", &self.n_rt),
            ("N_nrt", &self.n_nrt),
            ("D_rt", &self.d_rt),
            ("D_nrt", &self.d_nrt),
        ]
    }
}

/// Runs all replications of `config` and aggregates them.
pub fn run_simulation(config: &SimConfig) -> Result<SimMetrics> {
    config.validate()?;
    let records = (0..config.replications)
        .into_par_iter()
        .map(|k| run_replication(config, config.replication_seed(k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimMetrics::aggregate(*config, records))
}
