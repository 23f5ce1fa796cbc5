//! Transformation of the continuous matrix Schrödinger system.
//!
//! A [`ParameterTriple`](crate::ParameterTriple) with the skew signature
//! generates matrix functions `Π(x)`, `S(x)` on `[0, L]`. From those the
//! transformed potential `ũ`, the Darboux matrix `w_A(x, λ)`, transformed
//! eigenfunctions and explicit solutions `ψ(x, t)` of
//! `i ∂ψ/∂t = -∂²ψ/∂x² + ũ ψ` follow in closed form.

mod evolve;
mod grid;
mod soliton;
mod transform;

pub use evolve::{evolve_closed_form, evolve_ode, ContinuousState, DEFAULT_STEP};
pub use grid::{Grid, Potential};
pub use soliton::{fit_sech2, soliton_triple, SechFit};
pub use transform::{
    darboux_intertwining_residual, darboux_matrix, dynamical_solution, l2_identity,
    transform_eigenfunction, transformed_potential, x_blocks, DynamicalSolution, L2Identity,
    TransformedEigenfunction, XBlocks,
};
