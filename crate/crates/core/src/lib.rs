//! Explicit solutions of continuous and discrete dynamical Schrödinger
//! systems by the generalized Bäcklund–Darboux transformation (GBDT).
//!
//! The crate is organised around the generating triple `(A, S(0), Π(0))`:
//!
//! * [`linalg`]: dense complex kernels (exponential, Hermitian roots, solves).
//! * [`continuous`]: `Π(x)`, `S(x)`, the transformed potential `ũ`, the
//!   Darboux matrix and explicit solutions `ψ(x, t)`.
//! * [`discrete`]: block Jacobi matrices, the recursion for `Π_k`, `S_k`, the
//!   transformed Jacobi matrix `J̃` and solutions `Ψ(t) = Y e^{-itA}`.
//! * [`asymptotics`]: growth exponents of `‖ψ(·, t) g‖` read off the Jordan
//!   structure of `A`, and an empirical fit to check them.
//! * [`verify`]: the seeded invariant suite behind `gbdt verify`.
//!
//! The guide in `book/` walks through each piece with runnable examples.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod continuous;
pub mod discrete;
mod error;
pub mod linalg;
pub mod quadrature;
pub mod random;
pub mod report;
mod tolerances;
mod triple;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{CMatrix, Hermitian, C64};
pub use tolerances::Tolerances;
pub use triple::{
    identity_residual, validate_discrete_triple, validate_triple, ParameterTriple, SignatureJ,
    Variant,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/linear-algebra.md")]
    mod linear_algebra {}
    #[doc = include_str!("../../../book/src/continuous.md")]
    mod continuous {}
    #[doc = include_str!("../../../book/src/solitons.md")]
    mod solitons {}
    #[doc = include_str!("../../../book/src/discrete.md")]
    mod discrete {}
    #[doc = include_str!("../../../book/src/asymptotics.md")]
    mod asymptotics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
