use rayon::prelude::*;

use crate::discrete::jacobi::BlockJacobi;
use crate::discrete::recursion::RecursionTrajectory;
use crate::discrete::transform::TransformedJacobi;
use crate::error::{Error, Result};
use crate::linalg::{block, herm_inv_sqrt, mat_exp, max_nan, CMatrix, I};

/// Relative size allowed for the first `h` columns of `Π₀`.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Blocks `y_k = [0 C̃(k)^{-1/2}] Π_{k-1}* S_{k-1}⁻¹` of the generalized
/// eigenvector `Y` with `J̃Y = YA`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBlocks {
    /// `y_k` for `k = 1..=N`.
    pub y: Vec<CMatrix>,
    /// `‖(J̃Y)_k - y_kA‖` for rows `k = 1..=N-1`.
    pub row_residuals: Vec<f64>,
    /// Row `N` of the truncated product, which misses the `ã_N y_{N+1}` term.
    pub last_row_residual: f64,
}

impl EigenBlocks {
    pub fn max_row_residual(&self) -> f64 {
        self.row_residuals.iter().copied().fold(0.0, max_nan)
    }
}

/// Norm of the first `h` columns of `Π₀`, which must vanish for `Y` to
/// satisfy the first row of `J̃Y = YA`.
pub fn boundary_norm(traj: &RecursionTrajectory) -> f64 {
    block(&traj.triple.pi0, 0, 0, traj.n(), traj.h()).norm()
}

pub fn eigen_blocks(traj: &RecursionTrajectory, t: &TransformedJacobi) -> Result<EigenBlocks> {
    let (n, h) = (traj.n(), traj.h());
    let norm = boundary_norm(traj);
    let tolerance = BOUNDARY_TOL * traj.triple.pi0.norm();
    if norm > tolerance {
        return Err(Error::BoundaryCondition { norm, tolerance });
    }
    let n_steps = t.truncation();
    let y = (1..=n_steps)
        .map(|k| {
            let root = herm_inv_sqrt(t.c(k))?;
            Ok(root.as_matrix() * block(&traj.f[k - 1], h, 0, h, n))
        })
        .collect::<Result<Vec<_>>>()?;
    let a = &traj.triple.a;
    let row = |k: usize| (t.jacobi.apply_row(k, &y) - &y[k - 1] * a).norm();
    Ok(EigenBlocks {
        row_residuals: (1..n_steps).map(row).collect(),
        last_row_residual: row(n_steps),
        y,
    })
}

/// `Ψ(t) = Y e^{-itA}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSolution {
    pub y: Vec<CMatrix>,
    pub a: CMatrix,
}

pub fn discrete_solution(blocks: &EigenBlocks, a: &CMatrix) -> DiscreteSolution {
    DiscreteSolution {
        y: blocks.y.clone(),
        a: a.clone(),
    }
}

impl DiscreteSolution {
    pub fn propagator(&self, t: f64) -> Result<CMatrix> {
        mat_exp(&(&self.a * (-I * t)))
    }

    /// Blocks `Ψ_k(t)`, `k = 1..=N`.
    pub fn psi(&self, t: f64) -> Result<Vec<CMatrix>> {
        let e = self.propagator(t)?;
        Ok(self.y.iter().map(|yk| yk * &e).collect())
    }

    /// `Ψ(t)` for every `t`, evaluated in parallel.
    pub fn psi_grid(&self, ts: &[f64]) -> Result<Vec<Vec<CMatrix>>> {
        ts.par_iter().map(|&t| self.psi(t)).collect()
    }

    /// `max_k ‖iΨ_k'(t) - (J̃Ψ(t))_k‖` over rows `k = 1..=N-1`, with
    /// `iΨ'(t) = YAe^{-itA}` taken analytically.
    pub fn dynamical_residual(&self, jacobi: &BlockJacobi, t: f64) -> Result<f64> {
        let e = self.propagator(t)?;
        let psi: Vec<CMatrix> = self.y.iter().map(|yk| yk * &e).collect();
        let ae = &self.a * &e;
        Ok((1..self.y.len())
            .map(|k| (&self.y[k - 1] * &ae - jacobi.apply_row(k, &psi)).norm())
            .fold(0.0, max_nan))
    }
}
