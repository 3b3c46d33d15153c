//! Exponential-Euler integration of the renormalised equation, directly or
//! through the (φ, ψ) split, with norm monitors and run diagnostics.

mod checkpoint;
mod config;
mod diagnostics;
mod engine;
mod nonlinearity;
mod split;

pub use checkpoint::{config_hash, Checkpoint, CHECKPOINT_FORMAT};
pub use config::{InitialData, Mode, NoiseSpec, SolverConfig};
pub use diagnostics::{coercive_monitor, envelope_ratio, uniqueness_diagnostic, CoerciveEntry, Trajectory};
pub use engine::{richardson, Fields, Solver, SolverState};
pub use nonlinearity::NonlinearityPoly;
pub use split::{SplitOps, SplitTerms};
