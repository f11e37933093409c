//! Real-time evolution: exact diagonalization, Lanczos propagation, Trotter
//! product formulas and the one-period propagator of a periodic drive.

mod exact;
mod krylov;
mod periodic;
mod trotter;

pub use exact::evolve_exact;
pub use krylov::{evolve_krylov, krylov_step, KrylovOptions};
pub use periodic::floquet_operator;
pub use trotter::{trotter_evolve, TermSplit};

use crate::C64;
use nalgebra::DVector;
use serde::Serialize;

/// Which engine produced a trajectory, with its numerical settings.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum MethodInfo {
    Exact,
    Krylov {
        dt: f64,
        krylov_dim: usize,
        tol: f64,
        max_error_estimate: f64,
    },
    Trotter {
        dt: f64,
        order: u8,
        n_terms: usize,
        gate_count: usize,
    },
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<DVector<C64>>,
    pub method: MethodInfo,
    /// `| ||psi(t)|| - 1 |` at every recorded time.
    pub norm_drift: Vec<f64>,
}

impl EvolutionResult {
    fn new(method: MethodInfo) -> Self {
        EvolutionResult {
            times: Vec::new(),
            states: Vec::new(),
            method,
            norm_drift: Vec::new(),
        }
    }

    fn record(&mut self, t: f64, state: DVector<C64>) {
        self.norm_drift.push((state.norm() - 1.0).abs());
        self.times.push(t);
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Option<&DVector<C64>> {
        self.states.last()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm_drift.iter().copied().fold(0.0, f64::max)
    }
}

/// `1 - |<a|b>|^2` for normalized vectors.
pub fn infidelity(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    1.0 - a.dotc(b).norm_sqr()
}
