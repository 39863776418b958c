//! Analysis toolkit for a single-server buffer shared by a real-time (RT)
//! and a non-real-time (NRT) traffic class.
//!
//! RT customers get service priority but may occupy at most `R` places; NRT
//! customers own the remaining `N = T - R` places. The crate builds the
//! continuous-time Markov chain of the two occupancies, solves it for the
//! stationary distribution, derives loss and delay measures per class,
//! scores partitions with a weighted grade-of-service cost, and
//! cross-checks everything with a discrete-event simulator.

pub mod ctmc;
pub mod error;
pub mod metrics;
pub mod model;
pub mod sim;
pub mod wgos;

pub use ctmc::{solve_steady_state, verify_residual, SteadyState};
pub use error::{ModelError, Result};
pub use metrics::ClassMetrics;
pub use model::{build_generator, build_state_space, BufferConfig, Generator, GeneratorMode, State, StateSpace, TrafficParams};
pub use sim::{run_simulation, validate, Discipline, SimConfig, SimMetrics, ValidationReport};
pub use wgos::{sweep_threshold, wgos_gamma, CostWeights, SweepResult, WGoSResult};

/// Builds, solves and measures one configuration.
pub fn analyze(params: &TrafficParams, config: BufferConfig, mode: GeneratorMode) -> Result<ClassMetrics> {
    let gen = build_generator(*params, config, mode)?;
    let ss = solve_steady_state(&gen)?;
    Ok(ClassMetrics::compute(&ss, params))
}
