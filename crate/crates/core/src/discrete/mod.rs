//! Transformation of block Jacobi matrices and the discrete dynamical
//! Schrödinger system `i Ψ'(t) = J̃ Ψ(t)`.
//!
//! Given Jacobi data `C(k) ≻ 0`, `Q(k)` and a triple with the symmetric
//! signature `j = [[0, I], [I, 0]]`, [`run_recursion`] produces `Π_k`, `S_k`;
//! [`transform_jacobi`] yields `C̃(k)`, `Q̃(k)` and `J̃`; [`eigen_blocks`]
//! yields `Y` with `J̃Y = YA`, from which `Ψ(t) = Ye^{-itA}`.

mod jacobi;
mod recursion;
mod solution;
mod transform;

pub use jacobi::{build_initial_jacobi, commutation_residual, BlockJacobi, JacobiData};
pub use recursion::{projector, run_recursion, xi, xi_inverse, zeta, RecursionTrajectory};
pub use solution::{
    boundary_norm, discrete_solution, eigen_blocks, DiscreteSolution, EigenBlocks, BOUNDARY_TOL,
};
pub use transform::{transform_jacobi, xi_tilde, xi_tilde_checks, TransformedJacobi, XiTildeReport};
