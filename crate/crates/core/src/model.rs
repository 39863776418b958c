//! Domain types for the two-class partitioned buffer and its CTMC generator.
//!
//! The buffer admits at most `R` real-time (RT) customers and at most `N`
//! non-real-time (NRT) customers. The system state is the pair `(i, j)` of RT
//! and NRT counts, so the chain lives on the `(R + 1) x (N + 1)` lattice.

use std::fmt;
use std::str::FromStr;

use crate::error::{ModelError, Result};

/// Poisson arrival rates and exponential service rates of both classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficParams {
    pub lambda_rt: f64,
    pub lambda_nrt: f64,
    pub mu_rt: f64,
    pub mu_nrt: f64,
}

impl TrafficParams {
    pub fn new(lambda_rt: f64, lambda_nrt: f64, mu_rt: f64, mu_nrt: f64) -> Result<Self> {
        let params = Self {
            lambda_rt,
            lambda_nrt,
            mu_rt,
            mu_nrt,
        };
        params.validate()?;
        Ok(params)
    }

    /// Checks the rate constraints; useful after mutating fields directly.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("lambda_rt", self.lambda_rt), ("lambda_nrt", self.lambda_nrt)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(ModelError::Config(format!(
                    "{name} must be finite and >= 0, got {value}"
                )));
            }
        }
        for (name, value) in [("mu_rt", self.mu_rt), ("mu_nrt", self.mu_nrt)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::Config(format!(
                    "{name} must be finite and > 0, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Total offered arrival rate.
    pub fn total_arrival_rate(&self) -> f64 {
        self.lambda_rt + self.lambda_nrt
    }

    /// The same system with the roles of the two classes exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            lambda_rt: self.lambda_nrt,
            lambda_nrt: self.lambda_rt,
            mu_rt: self.mu_nrt,
            mu_nrt: self.mu_rt,
        }
    }
}

/// Partition of the buffer: `r_threshold` RT places and `n_capacity` NRT places.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BufferConfig {
    r_threshold: usize,
    n_capacity: usize,
}

impl BufferConfig {
    pub fn new(r_threshold: usize, n_capacity: usize) -> Result<Self> {
        if r_threshold < 1 {
            return Err(ModelError::Config(format!(
                "r_threshold must be >= 1, got {r_threshold}"
            )));
        }
        if n_capacity < 1 {
            return Err(ModelError::Config(format!(
                "n_capacity must be >= 1, got {n_capacity}"
            )));
        }
        Ok(Self {
            r_threshold,
            n_capacity,
        })
    }

    /// Splits a total capacity `T` at threshold `R`, giving `N = T - R`.
    pub fn from_total(total: usize, r_threshold: usize) -> Result<Self> {
        if r_threshold >= total {
            return Err(ModelError::Config(format!(
                "r_threshold must be < total capacity T (need 1 <= R <= T - 1), got R = {r_threshold}, T = {total}"
            )));
        }
        Self::new(r_threshold, total - r_threshold)
    }

    pub fn r_threshold(&self) -> usize {
        self.r_threshold
    }

    pub fn n_capacity(&self) -> usize {
        self.n_capacity
    }

    /// Total buffer capacity `T = R + N`.
    pub fn total(&self) -> usize {
        self.r_threshold + self.n_capacity
    }

    pub fn swapped(&self) -> Self {
        Self {
            r_threshold: self.n_capacity,
            n_capacity: self.r_threshold,
        }
    }
}

/// Lattice point: `i` RT customers and `j` NRT customers in the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub i: usize,
    pub j: usize,
}

impl State {
    pub const fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// All lattice states in row-major order: `(0,0), (0,1), .., (0,N), (1,0), ..`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    config: BufferConfig,
    states: Vec<State>,
}

impl StateSpace {
    pub fn config(&self) -> BufferConfig {
        self.config
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, index: usize) -> State {
        self.states[index]
    }

    /// Position of `state` in the ordering, or `None` if it lies off the lattice.
    pub fn index(&self, state: State) -> Option<usize> {
        let (r, n) = (self.config.r_threshold, self.config.n_capacity);
        (state.i <= r && state.j <= n).then(|| state.i * (n + 1) + state.j)
    }
}

/// Builds the full `(R + 1)(N + 1)` lattice for `config`.
pub fn build_state_space(config: BufferConfig) -> StateSpace {
    let (r, n) = (config.r_threshold, config.n_capacity);
    let states = (0..=r)
        .flat_map(|i| (0..=n).map(move |j| State::new(i, j)))
        .collect();
    StateSpace { config, states }
}

/// Which service transitions are active in states holding both classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GeneratorMode {
    /// Both classes are served at their own rates whenever present.
    #[default]
    PaperLiteral,
    /// RT is served whenever present; NRT only when no RT customer is present.
    StrictPriority,
}

impl GeneratorMode {
    pub const ALL: [GeneratorMode; 2] = [GeneratorMode::PaperLiteral, GeneratorMode::StrictPriority];

    /// Short name used in CSV output and on the command line.
    pub fn as_str(&self) -> &'static str {
        match self {
            GeneratorMode::PaperLiteral => "literal",
            GeneratorMode::StrictPriority => "strict",
        }
    }

    fn nrt_service_active(&self, state: State) -> bool {
        match self {
            GeneratorMode::PaperLiteral => state.j > 0,
            GeneratorMode::StrictPriority => state.j > 0 && state.i == 0,
        }
    }
}

impl fmt::Display for GeneratorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeneratorMode {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "literal" | "paper-literal" | "paperliteral" => Ok(GeneratorMode::PaperLiteral),
            "strict" | "strict-priority" | "strictpriority" => Ok(GeneratorMode::StrictPriority),
            other => Err(ModelError::Config(format!(
                "unknown generator mode '{other}' (expected literal or strict)"
            ))),
        }
    }
}

/// Dense transition-rate matrix over a [`StateSpace`].
///
/// Row `k` holds the rates out of state `k`; the diagonal is the negative sum
/// of the off-diagonal entries so every row sums to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    space: StateSpace,
    rates: Vec<f64>,
    mode: GeneratorMode,
    params: TrafficParams,
}

impl Generator {
    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn mode(&self) -> GeneratorMode {
        self.mode
    }

    pub fn params(&self) -> TrafficParams {
        self.params
    }

    pub fn dim(&self) -> usize {
        self.space.len()
    }

    pub fn rate(&self, from: usize, to: usize) -> f64 {
        self.rates[from * self.dim() + to]
    }

    /// Row of rates out of state index `from`.
    pub fn row(&self, from: usize) -> &[f64] {
        let n = self.dim();
        &self.rates[from * n..(from + 1) * n]
    }

    /// Row-major copy of the full matrix.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|k| self.row(k).to_vec()).collect()
    }
}

/// Builds the generator matrix for the given rates, partition and mode.
pub fn build_generator(
    params: TrafficParams,
    config: BufferConfig,
    mode: GeneratorMode,
) -> Result<Generator> {
    params.validate()?;
    let space = build_state_space(config);
    let n = space.len();
    let (r_max, n_max) = (config.r_threshold, config.n_capacity);
    let mut rates = vec![0.0; n * n];

    for (from, &s) in space.states.iter().enumerate() {
        let mut put = |to: State, rate: f64| {
            if rate > 0.0 {
                let to = space.index(to).expect("neighbor lies on the lattice");
                rates[from * n + to] += rate;
            }
        };
        if s.j < n_max {
            put(State::new(s.i, s.j + 1), params.lambda_nrt);
        }
        if s.i < r_max {
            put(State::new(s.i + 1, s.j), params.lambda_rt);
        }
        if mode.nrt_service_active(s) {
            put(State::new(s.i, s.j - 1), params.mu_nrt);
        }
        if s.i > 0 {
            put(State::new(s.i - 1, s.j), params.mu_rt);
        }
        let row = &mut rates[from * n..(from + 1) * n];
        let out: f64 = row.iter().sum();
        row[from] = -out;
    }

    Ok(Generator {
        space,
        rates,
        mode,
        params,
    })
}
