use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by the builders and the checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Generating-identity residual, relative to `1 + ‖A‖‖S‖`.
    pub id_tol: f64,
    /// Analytic-chain residual of the transformed Schrödinger equations.
    pub pde_tol: f64,
    /// Quadrature identities.
    pub quad_tol: f64,
    /// Minimum distance of `λ` from `σ(A)`, relative to `1 + ‖A‖`.
    pub spectral_guard: f64,
    /// Discrete eigen-relation residuals.
    pub eig_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            id_tol: 1e-9,
            pde_tol: 1e-8,
            quad_tol: 1e-8,
            spectral_guard: 1e-8,
            eig_tol: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            id_tol: self.id_tol * factor,
            pde_tol: self.pde_tol * factor,
            quad_tol: self.quad_tol * factor,
            spectral_guard: self.spectral_guard * factor,
            eig_tol: self.eig_tol * factor,
        }
    }
}
