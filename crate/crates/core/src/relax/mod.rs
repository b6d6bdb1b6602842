//! Degree-corrected weighted MAX2SAT, its unit-vector relaxation and
//! hyperplane rounding.
//!
//! A clause `a ∨ b` of weight `w` contributes
//! `w/4 · (3 + v0·a + v0·b − a·b)` to the relaxed objective, where the vector
//! of a literal is `±v_var` and `v0` is the truth vector. For boolean vectors
//! (`v_var = ±v0`) this is `w` when the clause is satisfied and 0 otherwise.

mod oracle;
mod rounding;
mod solver;
mod weights;
mod wcnf;

use thiserror::Error;

pub use oracle::{brute_force_opt, MAX_BRUTE_FORCE_VARS};
pub use rounding::{round_hyperplane, RoundedAssignment, RoundingConfig};
pub use solver::{relaxed_objective, solve_relaxation, SolverConfig, VectorSolution};
pub use wcnf::{parse_wcnf, write_wcnf};
pub use weights::{
    build_weighted, gradient_f, objective_value, weighted_from_gradients, Assignment,
    WeightedClause, WeightedInstance,
};

#[derive(Debug, Error)]
pub enum RelaxError {
    #[error("degrees must be positive, got ({0}, {1})")]
    InvalidDegree(u32, u32),
    #[error("alpha must lie in [0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("{vars} variables but {pairs} degree pairs")]
    DegreeCountMismatch { vars: usize, pairs: usize },
    #[error("assignment has {got} values, instance has {expected} variables")]
    AssignmentLength { expected: usize, got: usize },
    #[error("1-link clause passed where 2-link clauses were expected")]
    UnexpectedUnitClause,
    #[error("relaxation did not converge in {iterations} iterations (gradient norm {grad_norm:e})")]
    NotConverged {
        iterations: usize,
        grad_norm: f64,
        best: Box<VectorSolution>,
    },
    #[error("brute force refused: {0} variables exceeds the limit of {MAX_BRUTE_FORCE_VARS}")]
    TooLarge(usize),
    #[error("n_cuts must be at least 1")]
    NoCuts,
    #[error("rotation must lie in [0, 1], got {0}")]
    InvalidRotation(f64),
    #[error("vector of variable {0} vanished after rotation")]
    DegenerateRotation(usize),
    #[error("wcnf line {line}: {msg}")]
    Wcnf { line: usize, msg: String },
}
