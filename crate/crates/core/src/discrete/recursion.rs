use crate::discrete::jacobi::JacobiData;
use crate::error::{Error, Result};
use crate::linalg::{block, block2x2, identity, inv_hpd, solve_hpd, zeros, CMatrix, Hermitian, I};
use crate::tolerances::Tolerances;
use crate::triple::{identity_residual, validate_discrete_triple, ParameterTriple};

/// `ξ(k) = [[-iQ(k), C(k)], [C(k)⁻¹, 0]]`.
pub fn xi(data: &JacobiData, k: usize) -> Result<CMatrix> {
    let h = data.h();
    let c_inv = inv_hpd(data.c(k))?;
    Ok(block2x2(
        &(data.q(k) * -I),
        data.c(k).as_matrix(),
        c_inv.as_matrix(),
        &zeros(h, h),
    ))
}

/// `ζ(k) = diag(0, C(k)⁻¹)`.
pub fn zeta(data: &JacobiData, k: usize) -> Result<CMatrix> {
    let h = data.h();
    let c_inv = inv_hpd(data.c(k))?;
    Ok(block2x2(&zeros(h, h), &zeros(h, h), &zeros(h, h), c_inv.as_matrix()))
}

/// `P = diag(0, I_h)`.
pub fn projector(h: usize) -> CMatrix {
    block2x2(&zeros(h, h), &zeros(h, h), &zeros(h, h), &identity(h))
}

/// `ξ(k)⁻¹ = j ξ(k)* j`.
pub fn xi_inverse(xi: &CMatrix, j: &CMatrix) -> CMatrix {
    j * xi.adjoint() * j
}

/// The sequences `Π_k`, `S_k`, `X(k) = Π_k* S_k⁻¹ Π_k` for `k = 0..=N`.
#[derive(Debug, Clone)]
pub struct RecursionTrajectory {
    pub triple: ParameterTriple,
    pub data: JacobiData,
    pub pi: Vec<CMatrix>,
    pub s: Vec<Hermitian>,
    pub x: Vec<Hermitian>,
    /// `Π_k* S_k⁻¹`, `2h × n`.
    pub f: Vec<CMatrix>,
}

/// Runs `Π_k = Π_{k-1} ξ(k)⁻¹ - iAΠ_{k-1}P`, `S_k = S_{k-1} + Π_{k-1}ζ(k)Π_{k-1}*`.
pub fn run_recursion(
    triple: &ParameterTriple,
    data: &JacobiData,
    tol: &Tolerances,
) -> Result<RecursionTrajectory> {
    validate_discrete_triple(triple, tol.id_tol)?;
    let h = triple.h();
    if data.h() != h {
        return Err(Error::Dimension {
            context: "Jacobi data",
            expected: format!("{h}x{h} blocks"),
            found: format!("{0}x{0} blocks", data.h()),
        });
    }
    let n_steps = data.truncation();
    let j = triple.j.matrix();
    let p = projector(h);
    let a = &triple.a;

    let mut pi = Vec::with_capacity(n_steps + 1);
    let mut s = Vec::with_capacity(n_steps + 1);
    pi.push(triple.pi0.clone());
    s.push(triple.s0.clone());
    for k in 1..=n_steps {
        let prev = &pi[k - 1];
        let next = prev * xi_inverse(&xi(data, k)?, &j) - (a * prev * &p) * I;
        let sk = Hermitian::symmetrize(s[k - 1].as_matrix() + prev * zeta(data, k)? * prev.adjoint());
        pi.push(next);
        s.push(sk);
    }

    let mut x = Vec::with_capacity(n_steps + 1);
    let mut f = Vec::with_capacity(n_steps + 1);
    for (pk, sk) in pi.iter().zip(&s) {
        let fk = solve_hpd(sk, pk)?.adjoint();
        x.push(Hermitian::symmetrize(&fk * pk));
        f.push(fk);
    }

    Ok(RecursionTrajectory {
        triple: triple.clone(),
        data: data.clone(),
        pi,
        s,
        x,
        f,
    })
}

impl RecursionTrajectory {
    pub fn truncation(&self) -> usize {
        self.pi.len() - 1
    }

    pub fn h(&self) -> usize {
        self.triple.h()
    }

    pub fn n(&self) -> usize {
        self.triple.n()
    }

    /// Block `X_{ip}(k)`, `i, p ∈ {1, 2}`.
    pub fn x_block(&self, k: usize, i: usize, p: usize) -> CMatrix {
        let h = self.h();
        block(&self.x[k], (i - 1) * h, (p - 1) * h, h, h)
    }

    /// `‖AS_k - S_kA* - iΠ_k jΠ_k*‖ / (1 + ‖A‖‖S_k‖)` for `k = 0..=N`.
    pub fn identity_residuals(&self) -> Vec<f64> {
        let a = &self.triple.a;
        self.pi
            .iter()
            .zip(&self.s)
            .map(|(pk, sk)| {
                identity_residual(a, sk, pk, &self.triple.j) / (1.0 + a.norm() * sk.norm())
            })
            .collect()
    }

    /// Residual of the adjoint form
    /// `i jΠ_k* = i ξ(k) jΠ_{k-1}* - (I - P) jΠ_{k-1}* A*`, relative to
    /// `1 + ‖Π_k‖`, for `k = 1..=N`.
    pub fn adjoint_form_residuals(&self) -> Result<Vec<f64>> {
        let h = self.h();
        let j = self.triple.j.matrix();
        let p = projector(h);
        let q = identity(2 * h) - &p;
        let a_star = self.triple.a.adjoint();
        (1..=self.truncation())
            .map(|k| {
                let xik = xi(&self.data, k)?;
                let prev = &j * self.pi[k - 1].adjoint();
                let lhs = (&j * self.pi[k].adjoint()) * I;
                let rhs = (&xik * &prev) * I - &q * &prev * &a_star;
                Ok((lhs - rhs).norm() / (1.0 + self.pi[k].norm()))
            })
            .collect()
    }

    /// Largest violation of the algebra `ξjξ* = j`, `ξ*jξ = j`, `Pξj = ζ`,
    /// `PjP = 0`, `jPj = I - P` over `k = 1..=N`.
    pub fn algebra_residual(&self) -> Result<f64> {
        let h = self.h();
        let j = self.triple.j.matrix();
        let p = projector(h);
        let eye = identity(2 * h);
        let mut worst = (&p * &j * &p).norm();
        worst = worst.max((&j * &p * &j - (&eye - &p)).norm());
        for k in 1..=self.truncation() {
            let xik = xi(&self.data, k)?;
            let scale = 1.0 + xik.norm() * xik.norm();
            worst = worst.max((&xik * &j * xik.adjoint() - &j).norm() / scale);
            worst = worst.max((xik.adjoint() * &j * &xik - &j).norm() / scale);
            worst = worst.max((&p * &xik * &j - zeta(&self.data, k)?).norm() / scale);
        }
        Ok(worst)
    }

    /// Smallest eigenvalue of each increment `S_k - S_{k-1}`, `k = 1..=N`.
    pub fn increment_min_eigenvalues(&self) -> Vec<f64> {
        self.s
            .windows(2)
            .map(|w| Hermitian::symmetrize(w[1].as_matrix() - w[0].as_matrix()).min_eigenvalue())
            .collect()
    }

    pub fn min_s_eigenvalues(&self) -> Vec<f64> {
        self.s.iter().map(|s| s.min_eigenvalue()).collect()
    }
}
