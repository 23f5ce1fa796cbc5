//! Long-time growth of `‖ψ(·, t) g‖` from the Jordan structure of `A`.
//!
//! Generically `‖ψ(·, t) g‖ ≈ C e^{τt} |t|^r` as `t → ±∞`, with
//! `τ₊ = max Im λᵢ`, `τ₋ = min Im λᵢ` and `r±` the largest `nᵢ - 1` over
//! the blocks attaining `τ±`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::continuous::DynamicalSolution;
use crate::error::{Error, Result};
use crate::linalg::{c, identity, inv, mat_exp, set_block, zeros, CMatrix, CVector, C64};
use crate::quadrature::cumulative;

/// Relative distance under which eigenvalues are treated as equal.
pub const CLUSTER_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumSource {
    Declared,
    Computed,
}

/// Jordan data `{(λᵢ, nᵢ)}` of `A`, optionally with `U` such that
/// `A = U diag(J₁, …, J_N) U⁻¹`, `Jᵢ = λᵢI + Kᵢ`, `Kᵢ` the shift with ones on
/// the superdiagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanSpectrum {
    pub blocks: Vec<(C64, usize)>,
    pub u: Option<CMatrix>,
    pub source: SpectrumSource,
}

impl JordanSpectrum {
    /// User-declared blocks without a similarity.
    pub fn declared(blocks: Vec<(C64, usize)>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        if blocks.iter().any(|&(_, size)| size == 0) {
            return Err(Error::Invalid("Jordan blocks must have size >= 1".into()));
        }
        Ok(Self {
            blocks,
            u: None,
            source: SpectrumSource::Declared,
        })
    }

    /// User-declared blocks with a similarity `U`, checked against `A`:
    /// `‖A - UJU⁻¹‖ ≤ tol (1 + ‖A‖)`.
    pub fn declared_with_similarity(
        blocks: Vec<(C64, usize)>,
        u: CMatrix,
        a: &CMatrix,
        tol: f64,
    ) -> Result<Self> {
        let mut spec = Self::declared(blocks)?;
        if u.nrows() != spec.n() || u.ncols() != spec.n() || a.nrows() != spec.n() {
            return Err(Error::Dimension {
                context: "Jordan similarity",
                expected: format!("{0}x{0}", spec.n()),
                found: format!("U {}x{}, A {}x{}", u.nrows(), u.ncols(), a.nrows(), a.ncols()),
            });
        }
        let residual = (&u * spec.jordan_matrix() * inv(&u)? - a).norm();
        let tolerance = tol * (1.0 + a.norm());
        if residual > tolerance {
            return Err(Error::Identity {
                condition: "Jordan representation A = U J U^-1",
                residual,
                tolerance,
            });
        }
        spec.u = Some(u);
        Ok(spec)
    }

    /// Eigen-decomposition of a diagonalizable `A`.
    ///
    /// Eigenvalues come from the complex Schur form and are clustered at
    /// relative distance [`CLUSTER_TOL`]. Each cluster of multiplicity `m`
    /// must have an `m`-dimensional kernel of `A - λI`; otherwise `A` is
    /// (numerically) defective and its Jordan structure has to be declared.
    pub fn from_matrix(a: &CMatrix) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(Error::Dimension {
                context: "A",
                expected: "non-empty square matrix".into(),
                found: format!("{}x{}", a.nrows(), a.ncols()),
            });
        }
        let scale = 1.0 + a.norm();
        let (_, t) = a.clone().schur().unpack();
        let mut eigs: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
        eigs.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));

        let mut clusters: Vec<Vec<C64>> = Vec::new();
        for z in eigs {
            match clusters
                .iter_mut()
                .find(|cl| (cl[0] - z).norm() <= CLUSTER_TOL * scale)
            {
                Some(cl) => cl.push(z),
                None => clusters.push(vec![z]),
            }
        }

        let mut blocks = Vec::with_capacity(n);
        let mut u = zeros(n, n);
        let mut col = 0;
        for cl in clusters {
            let m = cl.len();
            let lambda = cl.iter().sum::<C64>() / c(m as f64, 0.0);
            let svd = (a - identity(n) * lambda).svd(false, true);
            let v = svd.v_t.expect("right singular vectors requested").adjoint();
            let sv = &svd.singular_values;
            if sv[n - m] > CLUSTER_TOL.sqrt() * scale {
                return Err(Error::MissingSimilarity(format!(
                    "eigenvalue {lambda} has multiplicity {m} but a smaller eigenspace; declare the Jordan structure"
                )));
            }
            for k in 0..m {
                set_block(&mut u, 0, col, &v.columns(n - m + k, 1).into_owned());
                blocks.push((lambda, 1));
                col += 1;
            }
        }
        let residual = (&u * diag_of(&blocks) * inv(&u).map_err(|_| {
            Error::MissingSimilarity("eigenvector matrix is singular".into())
        })? - a)
            .norm();
        if residual > CLUSTER_TOL.sqrt() * scale {
            return Err(Error::MissingSimilarity(format!(
                "eigenvector basis reproduces A only to {residual:.3e}"
            )));
        }
        Ok(Self {
            blocks,
            u: Some(u),
            source: SpectrumSource::Computed,
        })
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(|&(_, size)| size).sum()
    }

    /// `diag(J₁, …, J_N)`.
    pub fn jordan_matrix(&self) -> CMatrix {
        let n = self.n();
        let mut j = zeros(n, n);
        let mut off = 0;
        for &(lambda, size) in &self.blocks {
            for i in 0..size {
                j[(off + i, off + i)] = lambda;
                if i + 1 < size {
                    j[(off + i, off + i + 1)] = c(1.0, 0.0);
                }
            }
            off += size;
        }
        j
    }
}

fn diag_of(blocks: &[(C64, usize)]) -> CMatrix {
    let values: Vec<C64> = blocks.iter().map(|&(l, _)| l).collect();
    CMatrix::from_diagonal(&CVector::from_vec(values))
}

/// Growth exponents `τ±`, `r±`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthExponents {
    pub tau_plus: f64,
    pub tau_minus: f64,
    pub r_plus: usize,
    pub r_minus: usize,
}

/// Reads `τ±`, `r±` off the Jordan data.
///
/// Blocks whose imaginary parts agree with `τ±` to [`CLUSTER_TOL`] (relative
/// to `1 + max|λᵢ|`) attain it; for declared spectra this is exact equality
/// in practice.
pub fn growth_exponents(spec: &JordanSpectrum) -> Result<GrowthExponents> {
    if spec.blocks.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let tau_plus = spec.blocks.iter().map(|b| b.0.im).fold(f64::NEG_INFINITY, f64::max);
    let tau_minus = spec.blocks.iter().map(|b| b.0.im).fold(f64::INFINITY, f64::min);
    let radius = spec.blocks.iter().map(|b| b.0.norm()).fold(0.0, f64::max);
    let tie = CLUSTER_TOL * (1.0 + radius);
    let r_at = |tau: f64| {
        spec.blocks
            .iter()
            .filter(|b| (b.0.im - tau).abs() <= tie)
            .map(|b| b.1 - 1)
            .max()
            .unwrap_or(0)
    };
    Ok(GrowthExponents {
        tau_plus,
        tau_minus,
        r_plus: r_at(tau_plus),
        r_minus: r_at(tau_minus),
    })
}

/// `e^{-itA} = U diag(e^{-itJ₁}, …) U⁻¹` with
/// `e^{-itJᵢ} = e^{-iλᵢt} Σ_{k<nᵢ} (-itKᵢ)^k / k!`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpProfile {
    pub t: f64,
    /// `e^{-itJᵢ}` for each block.
    pub blocks: Vec<CMatrix>,
    pub u: CMatrix,
}

impl ExpProfile {
    /// The assembled `n × n` matrix.
    pub fn dense(&self) -> Result<CMatrix> {
        let n = self.u.nrows();
        let mut d = zeros(n, n);
        let mut off = 0;
        for b in &self.blocks {
            set_block(&mut d, off, off, b);
            off += b.nrows();
        }
        Ok(&self.u * d * inv(&self.u)?)
    }
}

pub fn exp_profile(spec: &JordanSpectrum, t: f64) -> Result<ExpProfile> {
    let u = spec.u.clone().ok_or_else(|| {
        Error::MissingSimilarity("declare U or use a diagonalizable A".into())
    })?;
    let blocks = spec
        .blocks
        .iter()
        .map(|&(lambda, size)| {
            let phase = (c(0.0, -t) * lambda).exp();
            let mut b = zeros(size, size);
            let mut coeff = phase;
            for k in 0..size {
                for i in 0..size - k {
                    b[(i, i + k)] = coeff;
                }
                coeff *= c(0.0, -t) / c((k + 1) as f64, 0.0);
            }
            b
        })
        .collect();
    Ok(ExpProfile { t, blocks, u })
}

/// Time window for the growth fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitWindow {
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
}

impl FitWindow {
    /// `[10², 10⁴]` when `τ = 0`; otherwise `[t_hi/100, t_hi]` with
    /// `t_hi = min(10³, 700/|τ|)` so that `e^{|τ|t}` stays representable.
    pub fn for_tau(tau: f64) -> Self {
        if tau == 0.0 {
            return Self {
                t_min: 1e2,
                t_max: 1e4,
                samples: 40,
            };
        }
        let t_hi = (700.0 / tau.abs()).min(1e3);
        Self {
            t_min: t_hi / 100.0,
            t_max: t_hi,
            samples: 40,
        }
    }

    /// Logarithmically spaced times.
    pub fn times(&self) -> Vec<f64> {
        let (a, b) = (self.t_min.ln(), self.t_max.ln());
        let m = self.samples.max(2);
        (0..m)
            .map(|k| (a + (b - a) * k as f64 / (m - 1) as f64).exp())
            .collect()
    }
}

/// `‖ψ(·, t) g‖_{L²(0, L)}` for each `t`, with `L` the end of the grid.
///
/// The Gram matrix `G = ∫₀^L z₂* z₂` is formed once by composite Simpson;
/// then `‖ψg‖² = (e^{-itA}g)* G (e^{-itA}g)`, evaluated after rescaling
/// `e^{-itA}g` so that large exponents do not overflow.
pub fn norm_samples(sol: &DynamicalSolution, g: &CVector, ts: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n = sol.a.nrows();
    if g.len() != n {
        return Err(Error::Dimension {
            context: "g",
            expected: format!("length {n}"),
            found: format!("length {}", g.len()),
        });
    }
    let integrand: Vec<CMatrix> = sol.z2.iter().map(|z| z.adjoint() * z).collect();
    let gram = cumulative(&sol.xs, &integrand)
        .pop()
        .ok_or_else(|| Error::Grid("empty grid".into()))?;
    ts.par_iter()
        .map(|&t| {
            let v = mat_exp(&(&sol.a * c(0.0, -t)))? * g;
            let m = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if !m.is_finite() {
                return Err(Error::NonFinite("propagated g in norm_samples"));
            }
            if m == 0.0 {
                return Ok((t, 0.0));
            }
            let w = v.scale(1.0 / m);
            let q = (w.adjoint() * &gram * &w)[(0, 0)].re.max(0.0);
            Ok((t, m * q.sqrt()))
        })
        .collect()
}

/// Least-squares estimates from `log‖·‖ ≈ log C + τ t + r log t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthFit {
    pub tau: f64,
    pub r: f64,
    pub c: f64,
    /// Root-mean-square residual of the log-linear model.
    pub rms: f64,
}

pub fn empirical_growth_fit(samples: &[(f64, f64)]) -> Result<GrowthFit> {
    if samples.len() < 20 {
        return Err(Error::InsufficientSamples(format!(
            "at least 20 samples, got {}",
            samples.len()
        )));
    }
    if let Some((index, &(_, value))) = samples
        .iter()
        .enumerate()
        .find(|(_, s)| !(s.1 > 0.0) || !s.1.is_finite())
    {
        return Err(Error::NonPositiveNorm { index, value });
    }
    let t_min = samples.iter().map(|s| s.0.abs()).fold(f64::INFINITY, f64::min);
    let t_max = samples.iter().map(|s| s.0.abs()).fold(0.0, f64::max);
    if !(t_min > 0.0) || t_max < 100.0 * t_min * (1.0 - 1e-9) {
        return Err(Error::InsufficientSamples(format!(
            "|t| spanning two decades away from 0, got [{t_min}, {t_max}]"
        )));
    }
    let m = samples.len();
    let design = DMatrix::from_fn(m, 3, |i, k| match k {
        0 => 1.0,
        1 => samples[i].0,
        _ => samples[i].0.abs().ln(),
    });
    let rhs = DVector::from_iterator(m, samples.iter().map(|s| s.1.ln()));
    let coef = design
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Invalid(e.to_string()))?;
    let resid = &design * &coef - &rhs;
    Ok(GrowthFit {
        tau: coef[1],
        r: coef[2],
        c: coef[0].exp(),
        rms: (resid.norm_squared() / m as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, I};

    #[test]
    fn exponents_of_simple_spectra() {
        let s = JordanSpectrum::declared(vec![(I, 1), (-I, 1)]).unwrap();
        let g = growth_exponents(&s).unwrap();
        assert_eq!((g.tau_plus, g.tau_minus, g.r_plus, g.r_minus), (1.0, -1.0, 0, 0));

        let s = JordanSpectrum::declared(vec![(c(0.0, 0.0), 3)]).unwrap();
        let g = growth_exponents(&s).unwrap();
        assert_eq!((g.tau_plus, g.tau_minus, g.r_plus, g.r_minus), (0.0, 0.0, 2, 2));

        let a = crate::random::hermitian(&mut crate::random::rng(3), 4).into_inner();
        let g = growth_exponents(&JordanSpectrum::from_matrix(&a).unwrap()).unwrap();
        assert!(g.tau_plus.abs() < 1e-12 && g.tau_minus.abs() < 1e-12);
    }

    #[test]
    fn exponents_ignore_order_and_lower_blocks() {
        let base = vec![(c(1.0, 0.5), 2), (c(-2.0, -0.3), 1), (c(0.0, 0.5), 3)];
        let g = growth_exponents(&JordanSpectrum::declared(base.clone()).unwrap()).unwrap();
        assert_eq!(g.r_plus, 2);
        let mut permuted = base.clone();
        permuted.reverse();
        assert_eq!(g, growth_exponents(&JordanSpectrum::declared(permuted).unwrap()).unwrap());
        let mut extra = base;
        extra.push((c(5.0, 0.1), 4));
        let h = growth_exponents(&JordanSpectrum::declared(extra).unwrap()).unwrap();
        assert_eq!((h.tau_plus, h.r_plus), (g.tau_plus, g.r_plus));
    }

    #[test]
    fn empty_spectrum_rejected() {
        assert_eq!(JordanSpectrum::declared(vec![]), Err(Error::EmptySpectrum));
    }

    #[test]
    fn nilpotent_profile() {
        let k = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let spec =
            JordanSpectrum::declared_with_similarity(vec![(c(0.0, 0.0), 2)], identity(2), &k, 1e-12)
                .unwrap();
        for t in [0.0, 0.7, -3.0] {
            let e = exp_profile(&spec, t).unwrap().dense().unwrap();
            let expected =
                CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, -t), c(0.0, 0.0), c(1.0, 0.0)]);
            assert!((e - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn profile_matches_dense_exponential() {
        for seed in 0..5 {
            let mut r = crate::random::rng(seed);
            let a = crate::random::complex_matrix(&mut r, 4, 4);
            let spec = JordanSpectrum::from_matrix(&a).unwrap();
            let growth = spec.blocks.iter().map(|b| b.0.im.abs()).fold(0.0, f64::max);
            for t in [0.0, 1.0, -5.0, 20.0, 50.0] {
                let p = exp_profile(&spec, t).unwrap().dense().unwrap();
                let d = mat_exp(&(&a * c(0.0, -t))).unwrap();
                let bound = 1e-9 * (growth * t.abs()).exp();
                assert!((&p - &d).norm() <= bound, "seed {seed} t {t}: {:e}", (&p - &d).norm() / bound);
            }
        }
    }

    #[test]
    fn defective_matrix_needs_declaration() {
        let a = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        assert!(matches!(
            JordanSpectrum::from_matrix(&a),
            Err(Error::MissingSimilarity(_))
        ));
        let spec = JordanSpectrum::declared(vec![(c(2.0, 0.0), 2)]).unwrap();
        assert!(matches!(exp_profile(&spec, 1.0), Err(Error::MissingSimilarity(_))));
    }

    #[test]
    fn repeated_eigenvalue_of_diagonal_matrix() {
        let a = diag(&[c(1.0, 0.0), c(1.0, 0.0), I]);
        let spec = JordanSpectrum::from_matrix(&a).unwrap();
        assert_eq!(spec.n(), 3);
        let p = exp_profile(&spec, 2.0).unwrap().dense().unwrap();
        assert!((p - mat_exp(&(&a * c(0.0, -2.0))).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn fit_recovers_exact_model() {
        let samples: Vec<(f64, f64)> = FitWindow::for_tau(0.0)
            .times()
            .into_iter()
            .map(|t| (t, 3.0 * t))
            .collect();
        let f = empirical_growth_fit(&samples).unwrap();
        assert!(f.tau.abs() < 1e-12 && (f.r - 1.0).abs() < 1e-9 && (f.c - 3.0).abs() < 1e-8);
    }

    #[test]
    fn fit_preconditions() {
        let short: Vec<(f64, f64)> = (1..10).map(|k| (k as f64, 1.0)).collect();
        assert!(matches!(empirical_growth_fit(&short), Err(Error::InsufficientSamples(_))));
        let narrow: Vec<(f64, f64)> = (1..=30).map(|k| (10.0 + k as f64, 1.0)).collect();
        assert!(matches!(empirical_growth_fit(&narrow), Err(Error::InsufficientSamples(_))));
        let mut zeros: Vec<(f64, f64)> = FitWindow::for_tau(0.0).times().into_iter().map(|t| (t, 1.0)).collect();
        zeros[4].1 = 0.0;
        assert_eq!(
            empirical_growth_fit(&zeros),
            Err(Error::NonPositiveNorm { index: 4, value: 0.0 })
        );
    }

    #[test]
    fn window_respects_exponent_range() {
        let w = FitWindow::for_tau(1.0);
        assert_eq!((w.t_min, w.t_max), (7.0, 700.0));
        let w = FitWindow::for_tau(0.01);
        assert_eq!((w.t_min, w.t_max), (10.0, 1000.0));
    }
}
