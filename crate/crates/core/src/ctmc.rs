//! Stationary distribution of the finite buffer chain.
//!
//! The solve uses Grassmann-Taksar-Heyman (GTH) state reduction, which only
//! adds and multiplies non-negative quantities and so stays accurate at
//! extreme rate ratios. When an arrival rate is zero the lattice is
//! reducible; the reduction then runs on the class reachable from the empty
//! state and every other state gets probability exactly zero.

use std::collections::VecDeque;

use crate::error::{ModelError, Result};
use crate::model::{Generator, State, StateSpace};

/// Default bound on `max |(P G)_k|` accepted from a solve.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Probabilities below this are flushed to zero after normalization.
const DENORMAL_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    space: StateSpace,
    prob: Vec<f64>,
    residual: Option<f64>,
}

impl SteadyState {
    /// Wraps an externally supplied distribution (in state-space order).
    ///
    /// Entries must be non-negative and sum to one within `1e-12`. The
    /// residual is unknown until checked with [`verify_residual`].
    pub fn from_probabilities(space: StateSpace, prob: Vec<f64>) -> Result<Self> {
        if prob.len() != space.len() {
            return Err(ModelError::DimensionMismatch {
                expected: space.len(),
                found: prob.len(),
            });
        }
        if let Some(bad) = prob.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(ModelError::Config(format!(
                "probabilities must be finite and non-negative, found {bad}"
            )));
        }
        let total: f64 = prob.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(ModelError::Config(format!(
                "probabilities must sum to 1, got {total}"
            )));
        }
        Ok(Self {
            space,
            prob,
            residual: None,
        })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    /// Probabilities indexed like `space().states()`.
    pub fn probabilities(&self) -> &[f64] {
        &self.prob
    }

    /// `P(i, j)`; zero for states off the lattice.
    pub fn prob(&self, state: State) -> f64 {
        self.space.index(state).map_or(0.0, |k| self.prob[k])
    }

    /// `max |(P G)_k|` measured at solve time, if this came from a solve.
    pub fn residual(&self) -> Option<f64> {
        self.residual
    }

    /// Iterates `(state, probability)` pairs in state-space order.
    pub fn iter(&self) -> impl Iterator<Item = (State, f64)> + '_ {
        self.space.states().iter().copied().zip(self.prob.iter().copied())
    }
}

/// Solves `P G = 0`, `P e = 1` with the default residual tolerance.
pub fn solve_steady_state(gen: &Generator) -> Result<SteadyState> {
    solve_steady_state_with_tolerance(gen, DEFAULT_TOLERANCE)
}

pub fn solve_steady_state_with_tolerance(gen: &Generator, tolerance: f64) -> Result<SteadyState> {
    let dim = gen.dim();
    let class = reachable_from_origin(gen);
    let local = gth(gen, &class)?;

    let mut prob = vec![0.0; dim];
    for (&k, p) in class.iter().zip(local) {
        prob[k] = if p < DENORMAL_FLOOR { 0.0 } else { p };
    }

    let mut ss = SteadyState {
        space: gen.space().clone(),
        prob,
        residual: None,
    };
    let residual = verify_residual(gen, &ss)?;
    if !(residual <= tolerance) {
        return Err(ModelError::Numerical {
            residual,
            tolerance,
        });
    }
    ss.residual = Some(residual);
    Ok(ss)
}

/// Returns `max_k |(P G)_k|` for the distribution `ss`.
pub fn verify_residual(gen: &Generator, ss: &SteadyState) -> Result<f64> {
    if gen.space() != ss.space() {
        return Err(ModelError::DimensionMismatch {
            expected: gen.dim(),
            found: ss.space().len(),
        });
    }
    let dim = gen.dim();
    let mut flow = vec![0.0; dim];
    for (from, &p) in ss.prob.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for (acc, &q) in flow.iter_mut().zip(gen.row(from)) {
            *acc += p * q;
        }
    }
    Ok(flow.iter().fold(0.0, |m, v| m.max(v.abs())))
}

/// Sorted indices of states reachable from the empty state `(0, 0)`.
fn reachable_from_origin(gen: &Generator) -> Vec<usize> {
    let dim = gen.dim();
    let origin = gen
        .space()
        .index(State::new(0, 0))
        .expect("origin is always on the lattice");
    let mut seen = vec![false; dim];
    let mut queue = VecDeque::from([origin]);
    seen[origin] = true;
    while let Some(k) = queue.pop_front() {
        for (to, &q) in gen.row(k).iter().enumerate() {
            if to != k && q > 0.0 && !seen[to] {
                seen[to] = true;
                queue.push_back(to);
            }
        }
    }
    (0..dim).filter(|&k| seen[k]).collect()
}

/// GTH reduction on the sub-generator induced by `class`.
///
/// `class` must be sorted and begin with the origin. Returns normalized
/// probabilities in the same order.
fn gth(gen: &Generator, class: &[usize]) -> Result<Vec<f64>> {
    let m = class.len();
    let mut a = vec![0.0; m * m];
    for (r, &from) in class.iter().enumerate() {
        for (c, &to) in class.iter().enumerate() {
            if r != c {
                a[r * m + c] = gen.rate(from, to);
            }
        }
    }

    // Eliminate states m-1 .. 1, folding their outflow into the survivors.
    let mut exit = vec![0.0; m];
    for k in (1..m).rev() {
        let s: f64 = a[k * m..k * m + k].iter().sum();
        if !(s > 0.0) {
            return Err(ModelError::Numerical {
                residual: f64::INFINITY,
                tolerance: DEFAULT_TOLERANCE,
            });
        }
        exit[k] = s;
        for i in 0..k {
            let into_k = a[i * m + k];
            if into_k == 0.0 {
                continue;
            }
            let f = into_k / s;
            for j in 0..k {
                if j != i {
                    a[i * m + j] += f * a[k * m + j];
                }
            }
        }
    }

    let mut pi = vec![0.0; m];
    pi[0] = 1.0;
    for k in 1..m {
        let inflow: f64 = (0..k).map(|i| pi[i] * a[i * m + k]).sum();
        pi[k] = inflow / exit[k];
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);
    Ok(pi)
}
