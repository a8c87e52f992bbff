//! Cone programs over the non-negative, second-order and PSD cones.

mod embed;
mod expr;
mod program;
mod solve;

pub use embed::{embed_hermitian, unembed, HERMITIAN_TOL};
pub use expr::{CAffMat, CLinExpr, HermVar, LinExpr};
pub use program::{Block, ConeKind, ConicProgram};
pub use solve::{
    solve, svec_to_mat, ClarabelBackend, ConicBackend, ConicSolution, SolveStatus, SolverSettings, DEFAULT_MAX_ITER,
    DEFAULT_TOL,
};
