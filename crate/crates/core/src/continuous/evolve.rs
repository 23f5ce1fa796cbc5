use crate::continuous::grid::{Grid, Potential};
use crate::error::{Error, Result};
use crate::linalg::{block, c, identity, is_posdef, mat_exp, max_nan, set_block, zeros, CMatrix, Hermitian};
use crate::quadrature::cumulative;
use crate::tolerances::Tolerances;
use crate::triple::{identity_residual, validate_triple, ParameterTriple};

/// Default integration step for [`evolve_ode`].
pub const DEFAULT_STEP: f64 = 1e-3;

/// Sampled trajectory `x ↦ (Π(x), S(x))` for a fixed triple and potential.
#[derive(Debug, Clone)]
pub struct ContinuousState {
    pub triple: ParameterTriple,
    pub grid: Grid,
    pub pi: Vec<CMatrix>,
    pub s: Vec<Hermitian>,
    pub u: Potential,
}

impl ContinuousState {
    pub fn n(&self) -> usize {
        self.triple.n()
    }

    pub fn h(&self) -> usize {
        self.triple.h()
    }

    pub fn xs(&self) -> &[f64] {
        self.grid.xs()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn phi1(&self, i: usize) -> CMatrix {
        block(&self.pi[i], 0, 0, self.n(), self.h())
    }

    pub fn phi2(&self, i: usize) -> CMatrix {
        block(&self.pi[i], 0, self.h(), self.n(), self.h())
    }

    pub fn u_at(&self, i: usize) -> CMatrix {
        self.u.at(self.xs()[i])
    }

    /// `‖A S(x) - S(x) A* - Π(x) j Π(x)*‖` at every sample.
    pub fn identity_residuals(&self) -> Vec<f64> {
        self.pi
            .iter()
            .zip(&self.s)
            .map(|(pi, s)| identity_residual(&self.triple.a, s, pi, &self.triple.j))
            .collect()
    }

    /// `1 + ‖A‖ max_x ‖S(x)‖`.
    pub fn identity_scale(&self) -> f64 {
        let smax = self.s.iter().map(|s| s.norm()).fold(0.0, f64::max);
        1.0 + self.triple.a.norm() * smax
    }

    /// Largest identity residual relative to [`identity_scale`](Self::identity_scale).
    pub fn relative_drift(&self) -> f64 {
        let worst = self.identity_residuals().into_iter().fold(0.0, max_nan);
        worst / self.identity_scale()
    }

    pub fn min_s_eigenvalues(&self) -> Vec<f64> {
        self.s.iter().map(|s| s.min_eigenvalue()).collect()
    }

    /// Fails with [`Error::Singular`] at the first sample where `S` is not
    /// positive definite.
    pub fn require_posdef(&self) -> Result<()> {
        for (i, s) in self.s.iter().enumerate() {
            let pd = is_posdef(s);
            if !pd.positive {
                return Err(Error::Singular {
                    sample: i,
                    x: self.xs()[i],
                    min_eigenvalue: pd.min_eigenvalue,
                });
            }
        }
        Ok(())
    }
}

/// Closed-form trajectory for `u ≡ 0`.
///
/// The blocks `Π = [Λ₁ Λ₂]` satisfy `Λ₁' = AΛ₂`, `Λ₂' = -Λ₁`, so the stacked
/// `[Λ₁; Λ₂](x)` is `exp(x 𝒜)` applied to its initial value with
/// `𝒜 = [[0, A], [-I_n, 0]]`. `S(x) = S(0) + ∫₀ˣ Λ₂Λ₂*` is accumulated by
/// composite Simpson on the grid.
pub fn evolve_closed_form(
    triple: &ParameterTriple,
    grid: &Grid,
    tol: &Tolerances,
) -> Result<ContinuousState> {
    validate_triple(triple, tol.id_tol)?;
    let (n, h) = (triple.n(), triple.h());

    let mut generator = zeros(2 * n, 2 * n);
    set_block(&mut generator, 0, n, &triple.a);
    set_block(&mut generator, n, 0, &(-identity(n)));

    let mut stacked0 = zeros(2 * n, h);
    set_block(&mut stacked0, 0, 0, &block(&triple.pi0, 0, 0, n, h));
    set_block(&mut stacked0, n, 0, &block(&triple.pi0, 0, h, n, h));

    let mut pi = Vec::with_capacity(grid.len());
    for &x in grid.xs() {
        if x == 0.0 {
            pi.push(triple.pi0.clone());
            continue;
        }
        let stacked = mat_exp(&generator.scale(x))? * &stacked0;
        let mut p = zeros(n, 2 * h);
        set_block(&mut p, 0, 0, &block(&stacked, 0, 0, n, h));
        set_block(&mut p, 0, h, &block(&stacked, n, 0, n, h));
        pi.push(p);
    }

    let integrand: Vec<CMatrix> = pi
        .iter()
        .map(|p| {
            let l2 = block(p, 0, h, n, h);
            &l2 * l2.adjoint()
        })
        .collect();
    let s = cumulative(grid.xs(), &integrand)
        .into_iter()
        .map(|acc| Hermitian::symmetrize(triple.s0.as_matrix() + acc))
        .collect();

    Ok(ContinuousState {
        triple: triple.clone(),
        grid: grid.clone(),
        pi,
        s,
        u: Potential::zero(h),
    })
}

/// Right-hand side `Π' = AΠq₁ + Πq₀`, `S' = Πq₁jΠ*` in block form:
/// `Φ₁' = AΦ₂ - Φ₂u`, `Φ₂' = -Φ₁`, `S' = Φ₂Φ₂*`.
fn rhs(a: &CMatrix, pi: &CMatrix, u: &CMatrix, h: usize) -> (CMatrix, CMatrix) {
    let n = pi.nrows();
    let phi1 = block(pi, 0, 0, n, h);
    let phi2 = block(pi, 0, h, n, h);
    let mut dpi = zeros(n, 2 * h);
    set_block(&mut dpi, 0, 0, &(a * &phi2 - &phi2 * u));
    set_block(&mut dpi, 0, h, &(-phi1));
    let ds = &phi2 * phi2.adjoint();
    (dpi, ds)
}

/// Classical fourth-order Runge–Kutta integration of `(Π, S)`.
///
/// Substeps never exceed `step` and break at every grid sample and every
/// potential knot, so the piecewise-linear potential stays smooth inside each
/// step. Accuracy is policed by the generating identity: if its relative
/// drift exceeds `tol.id_tol` an [`Error::Accuracy`] with a smaller step is
/// returned.
pub fn evolve_ode(
    triple: &ParameterTriple,
    u: &Potential,
    grid: &Grid,
    step: f64,
    tol: &Tolerances,
) -> Result<ContinuousState> {
    validate_triple(triple, tol.id_tol)?;
    let h = triple.h();
    if u.h() != h {
        return Err(Error::Dimension {
            context: "potential",
            expected: format!("{h}x{h}"),
            found: format!("{0}x{0}", u.h()),
        });
    }
    if !(step > 0.0) {
        return Err(Error::Grid(format!("step must be positive, got {step}")));
    }
    let length = grid.length();
    if u.extent() < length * (1.0 - 1e-12) {
        return Err(Error::Grid(format!(
            "potential tabulated up to {} but grid extends to {length}",
            u.extent()
        )));
    }

    let mut breaks: Vec<f64> = grid.xs().to_vec();
    breaks.extend(u.knots().iter().copied().filter(|&k| k > 0.0 && k < length));
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();

    let a = &triple.a;
    let mut pi = triple.pi0.clone();
    let mut s = triple.s0.as_matrix().clone();
    let mut out_pi = vec![pi.clone()];
    let mut out_s = vec![triple.s0.clone()];
    let mut next_sample = 1;
    let xs = grid.xs();

    for w in breaks.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let m = ((x1 - x0) / step - 1e-9).ceil().max(1.0) as usize;
        let dx = (x1 - x0) / m as f64;
        for k in 0..m {
            let x = x0 + k as f64 * dx;
            let u0 = u.at(x);
            let um = u.at(x + 0.5 * dx);
            let u1 = u.at(if k + 1 == m { x1 } else { x + dx });
            let (k1p, k1s) = rhs(a, &pi, &u0, h);
            let (k2p, k2s) = rhs(a, &(&pi + k1p.scale(0.5 * dx)), &um, h);
            let (k3p, k3s) = rhs(a, &(&pi + k2p.scale(0.5 * dx)), &um, h);
            let (k4p, k4s) = rhs(a, &(&pi + k3p.scale(dx)), &u1, h);
            let sixth = c(dx / 6.0, 0.0);
            pi += (k1p + k2p.scale(2.0) + k3p.scale(2.0) + k4p) * sixth;
            s += (k1s + k2s.scale(2.0) + k3s.scale(2.0) + k4s) * sixth;
        }
        if next_sample < xs.len() && x1 == xs[next_sample] {
            let sh = Hermitian::symmetrize(s.clone());
            s = sh.as_matrix().clone();
            out_pi.push(pi.clone());
            out_s.push(sh);
            next_sample += 1;
        }
    }

    let state = ContinuousState {
        triple: triple.clone(),
        grid: grid.clone(),
        pi: out_pi,
        s: out_s,
        u: u.clone(),
    };
    let drift = state.relative_drift();
    if drift > tol.id_tol {
        let factor = (0.5 * tol.id_tol / drift).powf(0.25).min(0.5);
        return Err(Error::Accuracy {
            drift,
            tolerance: tol.id_tol,
            suggested_step: step * factor,
        });
    }
    Ok(state)
}
