use crate::discrete::jacobi::{commutation_residual, BlockJacobi};
use crate::discrete::recursion::{projector, xi, RecursionTrajectory};
use crate::error::{Error, Result};
use crate::linalg::{block, block2x2, identity, inv, inv_hpd, is_posdef, max_nan, sigma_min, zeros, CMatrix, Hermitian, I};
use crate::tolerances::Tolerances;

/// `C̃(k)`, `Q̃(k)` and the transformed Jacobi matrix `J̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedJacobi {
    /// `C̃(k)` for `k = 1..=N+1`.
    pub c_t: Vec<Hermitian>,
    /// `Q̃(k)` for `k = 1..=N`.
    pub q_t: Vec<CMatrix>,
    pub jacobi: BlockJacobi,
}

impl TransformedJacobi {
    pub fn truncation(&self) -> usize {
        self.q_t.len()
    }

    /// `C̃(k)`, 1-based.
    pub fn c(&self, k: usize) -> &Hermitian {
        &self.c_t[k - 1]
    }

    /// `Q̃(k)`, 1-based.
    pub fn q(&self, k: usize) -> &CMatrix {
        &self.q_t[k - 1]
    }

    /// `‖C̃(k)Q̃(k)* - Q̃(k)C̃(k)‖ / (1 + ‖C̃‖‖Q̃‖)`, `k = 1..=N`.
    pub fn commutation_residuals(&self) -> Vec<f64> {
        self.q_t
            .iter()
            .zip(&self.c_t)
            .map(|(q, c)| commutation_residual(c, q) / (1.0 + c.norm() * q.norm()))
            .collect()
    }
}

/// `C̃(k) = C(k) + X₂₂(k-1)`, `Q̃(k) = Q(k) + i(X₂₁(k-1) - X₂₁(k))` and the
/// Jacobi blocks built from them.
pub fn transform_jacobi(traj: &RecursionTrajectory, tol: &Tolerances) -> Result<TransformedJacobi> {
    let n_steps = traj.truncation();
    let data = &traj.data;
    let mut c_t = Vec::with_capacity(n_steps + 1);
    for k in 1..=n_steps + 1 {
        let ck = Hermitian::symmetrize(data.c(k).as_matrix() + traj.x_block(k - 1, 2, 2));
        let pd = is_posdef(&ck);
        if !pd.positive {
            return Err(Error::NotPositiveDefinite {
                context: "transformed C(k)",
                min_eigenvalue: pd.min_eigenvalue,
            });
        }
        c_t.push(ck);
    }
    let q_t: Vec<CMatrix> = (1..=n_steps)
        .map(|k| data.q(k) + (traj.x_block(k - 1, 2, 1) - traj.x_block(k, 2, 1)) * I)
        .collect();

    for (c, q) in c_t.iter().zip(&q_t) {
        let residual = commutation_residual(c, q);
        let tolerance = tol.id_tol * (1.0 + c.norm() * q.norm());
        if residual > tolerance {
            return Err(Error::Identity {
                condition: "commutation of the transformed C(k), Q(k)",
                residual,
                tolerance,
            });
        }
    }

    let jacobi = BlockJacobi::from_sequences(&c_t, &q_t)?;
    Ok(TransformedJacobi { c_t, q_t, jacobi })
}

/// Residuals of the transformed `ξ̃(k)`, each listed for `k = 1..=N` and
/// normalised by the size of the terms involved.
#[derive(Debug, Clone, PartialEq)]
pub struct XiTildeReport {
    /// `max(‖ξ̃jξ̃* - j‖, ‖ξ̃*jξ̃ - j‖)`.
    pub j_unitarity: Vec<f64>,
    /// `‖C̆(k) - C̃(k)⁻¹‖` with `C̆(k) = C(k)⁻¹ - X₁₁(k)`.
    pub lower_block: Vec<f64>,
    /// `‖C̆(k) - C(k)⁻¹‖ = ‖X₁₁(k)‖`, kept as a diagnostic: this is not an
    /// identity and is generally far from zero.
    pub lower_block_untransformed: Vec<f64>,
    /// Norm of the `(2,2)` block of `ξ(k) - jX(k)(I-P) + jPX(k-1)`.
    pub corner_block: Vec<f64>,
    /// Agreement between the block form of `ξ̃(k)` and
    /// `ξ(k) - jX(k)(I-P) + jPX(k-1)`.
    pub consistency: Vec<f64>,
    /// `‖ξ̃(k)w̆(k-1) - w̆(k)ξ(k)‖`, `None` when `A` is numerically singular.
    pub factorization: Option<Vec<f64>>,
    pub factorization_note: Option<String>,
    /// `‖Π_k*S_k⁻¹ - iPΠ_{k-1}*S_{k-1}⁻¹A - jξ̃(k)jΠ_{k-1}*S_{k-1}⁻¹‖`.
    pub forward: Vec<f64>,
}

impl XiTildeReport {
    /// Largest entry of each series, in field order.
    pub fn maxima(&self) -> [(&'static str, Option<f64>); 6] {
        let m = |v: &[f64]| v.iter().copied().fold(0.0, max_nan);
        [
            ("j_unitarity", Some(m(&self.j_unitarity))),
            ("lower_block", Some(m(&self.lower_block))),
            ("corner_block", Some(m(&self.corner_block))),
            ("consistency", Some(m(&self.consistency))),
            ("factorization", self.factorization.as_deref().map(m)),
            ("forward", Some(m(&self.forward))),
        ]
    }
}

/// `ξ̃(k) = [[-iQ̃(k), C̃(k)], [C(k)⁻¹ - X₁₁(k), 0]]`.
pub fn xi_tilde(traj: &RecursionTrajectory, t: &TransformedJacobi, k: usize) -> Result<CMatrix> {
    let h = traj.h();
    let lower = inv_hpd(traj.data.c(k))?.into_inner() - traj.x_block(k, 1, 1);
    Ok(block2x2(&(t.q(k) * -I), t.c(k).as_matrix(), &lower, &zeros(h, h)))
}

/// `w̆(k) = I - i jΠ_k*S_k⁻¹A⁻¹Π_k`.
fn w_breve(traj: &RecursionTrajectory, a_inv: &CMatrix, j: &CMatrix, k: usize) -> CMatrix {
    identity(2 * traj.h()) - (j * &traj.f[k] * a_inv * &traj.pi[k]) * I
}

pub fn xi_tilde_checks(
    traj: &RecursionTrajectory,
    t: &TransformedJacobi,
    tol: &Tolerances,
) -> Result<XiTildeReport> {
    let h = traj.h();
    let j = traj.triple.j.matrix();
    let p = projector(h);
    let q = identity(2 * h) - &p;
    let a = &traj.triple.a;
    let n_steps = traj.truncation();

    let a_inv = if sigma_min(a) > tol.spectral_guard * (1.0 + a.norm()) {
        Some(inv(a)?)
    } else {
        None
    };

    let mut report = XiTildeReport {
        j_unitarity: Vec::with_capacity(n_steps),
        lower_block: Vec::with_capacity(n_steps),
        lower_block_untransformed: Vec::with_capacity(n_steps),
        corner_block: Vec::with_capacity(n_steps),
        consistency: Vec::with_capacity(n_steps),
        factorization: a_inv.as_ref().map(|_| Vec::with_capacity(n_steps)),
        factorization_note: a_inv.is_none().then(|| {
            format!(
                "A is numerically singular (smallest singular value {:.3e}); factorization check skipped",
                sigma_min(a)
            )
        }),
        forward: Vec::with_capacity(n_steps),
    };
    let mut w_prev = a_inv.as_ref().map(|ai| w_breve(traj, ai, &j, 0));

    for k in 1..=n_steps {
        let xik = xi(&traj.data, k)?;
        let xt = xi_tilde(traj, t, k)?;
        let xt_norm = xt.norm();
        let unit_scale = 1.0 + xt_norm * xt_norm;
        report.j_unitarity.push(
            (&xt * &j * xt.adjoint() - &j)
                .norm()
                .max((xt.adjoint() * &j * &xt - &j).norm())
                / unit_scale,
        );

        let lower = block(&xt, h, 0, h, h);
        let ct_inv = inv_hpd(t.c(k))?.into_inner();
        report
            .lower_block
            .push((&lower - &ct_inv).norm() / (1.0 + ct_inv.norm()));
        let c_inv = inv_hpd(traj.data.c(k))?.into_inner();
        report
            .lower_block_untransformed
            .push((&lower - &c_inv).norm() / (1.0 + c_inv.norm()));

        let alt = &xik - &j * traj.x[k].as_matrix() * &q + &j * &p * traj.x[k - 1].as_matrix();
        report.corner_block.push(block(&alt, h, h, h, h).norm());
        report
            .consistency
            .push((&alt - &xt).norm() / (1.0 + xt_norm));

        let f_prev = &traj.f[k - 1];
        let forward = &traj.f[k] - (&p * f_prev * a) * I - &j * &xt * &j * f_prev;
        let forward_scale = 1.0 + traj.f[k].norm() + f_prev.norm() * (a.norm() + xt_norm);
        report.forward.push(forward.norm() / forward_scale);

        if let (Some(ai), Some(wp), Some(out)) =
            (a_inv.as_ref(), w_prev.as_ref(), report.factorization.as_mut())
        {
            let wk = w_breve(traj, ai, &j, k);
            let scale = 1.0 + xt_norm * wp.norm() + wk.norm() * xik.norm();
            out.push((&xt * wp - &wk * &xik).norm() / scale);
            w_prev = Some(wk);
        }
    }
    Ok(report)
}
