//! Dense complex matrix kernels.
//!
//! Every formula in the crate reduces to a handful of operations on small
//! dense complex matrices: the exponential, Hermitian square roots,
//! positive-definiteness tests and Hermitian positive-definite solves.
//! Matrices are `nalgebra::DMatrix<Complex64>`; Hermitian inputs are wrapped
//! in [`Hermitian`] so that the symmetry check happens once, at the boundary.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative asymmetry tolerated before a matrix is rejected as non-Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// `λ_min` below this (absolute, or relative to `λ_max`) flags a positive
/// definite matrix as badly conditioned.
pub const CONDITIONING_FLOOR: f64 = 1e-12;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

/// Builds a matrix from real row-major data.
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    assert_eq!(data.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| c(data[i * cols + j], 0.0))
}

pub fn diag(values: &[C64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_column_slice(values))
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `f64::max` that lets NaN through, so residual scans cannot hide one.
pub fn max_nan(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Largest absolute column sum.
pub fn norm_1(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn check_square(m: &CMatrix, context: &'static str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension {
            context,
            expected: "square matrix".into(),
            found: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

/// A square matrix known to equal its conjugate transpose.
///
/// Construction through [`Hermitian::new`] rejects inputs whose asymmetry
/// exceeds [`HERMITIAN_TOL`] relative to `1 + ‖M‖` and symmetrizes the rest
/// as `(M + M*)/2`, so downstream code may rely on exact Hermitian symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian(CMatrix);

impl Hermitian {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::checked(m, "matrix")
    }

    pub fn checked(m: CMatrix, context: &'static str) -> Result<Self> {
        check_square(&m, context)?;
        if !is_finite(&m) {
            return Err(Error::NonFinite(context));
        }
        let asymmetry = (&m - m.adjoint()).norm();
        let tolerance = HERMITIAN_TOL * (1.0 + m.norm());
        if asymmetry > tolerance {
            return Err(Error::NotHermitian {
                context,
                asymmetry,
                tolerance,
            });
        }
        Ok(Self::symmetrize(m))
    }

    /// Symmetrizes without checking; for matrices Hermitian by construction.
    pub fn symmetrize(m: CMatrix) -> Self {
        let adj = m.adjoint();
        Hermitian((m + adj).scale(0.5))
    }

    pub fn identity(n: usize) -> Self {
        Hermitian(identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Hermitian(zeros(n, n))
    }

    pub fn from_real_diagonal(values: &[f64]) -> Self {
        let d: Vec<C64> = values.iter().map(|&v| c(v, 0.0)).collect();
        Hermitian(diag(&d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(f64::INFINITY)
    }

    /// Applies `f` to the spectrum: `V f(Λ) V*`.
    fn spectral_map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let eig = SymmetricEigen::new(self.0.clone());
        let v = &eig.eigenvectors;
        let d: Vec<C64> = eig.eigenvalues.iter().map(|&l| c(f(l), 0.0)).collect();
        v * diag(&d) * v.adjoint()
    }
}

impl std::ops::Deref for Hermitian {
    type Target = CMatrix;

    fn deref(&self) -> &CMatrix {
        &self.0
    }
}

/// Padé(13,13) numerator coefficients for the exponential.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// 1-norm bound below which the degree-13 approximant is accurate to unit roundoff.
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a fixed Padé(13,13) kernel.
pub fn mat_exp(m: &CMatrix) -> Result<CMatrix> {
    check_square(m, "mat_exp")?;
    if !is_finite(m) {
        return Err(Error::NonFinite("mat_exp"));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(zeros(0, 0));
    }

    let norm = norm_1(m);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = m.scale(0.5f64.powi(squarings));

    let b = &PADE13;
    let ident = identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (a6.scale(b[13]) + a4.scale(b[11]) + a2.scale(b[9]))
        + a6.scale(b[7])
        + a4.scale(b[5])
        + a2.scale(b[3])
        + ident.scale(b[1]);
    let u = &a * u_inner;
    let v = &a6 * (a6.scale(b[12]) + a4.scale(b[10]) + a2.scale(b[8]))
        + a6.scale(b[6])
        + a4.scale(b[4])
        + a2.scale(b[2])
        + ident.scale(b[0]);

    let denom = &v - &u;
    let numer = &v + &u;
    let mut r = denom
        .lu()
        .solve(&numer)
        .ok_or_else(|| Error::Invalid("mat_exp: singular Padé denominator".into()))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

/// Outcome of a positive-definiteness test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosDef {
    /// A Cholesky factorization with strictly positive pivots exists.
    pub positive: bool,
    /// Smallest eigenvalue of the matrix.
    pub min_eigenvalue: f64,
    /// Positive, but `λ_min` sits below [`CONDITIONING_FLOOR`].
    pub ill_conditioned: bool,
}

/// Lower Cholesky factor of a Hermitian matrix, or the index and value of
/// the first non-positive pivot.
fn cholesky(m: &CMatrix) -> std::result::Result<CMatrix, (usize, f64)> {
    let n = m.nrows();
    let mut l = zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err((j, d));
        }
        let djj = d.sqrt();
        l[(j, j)] = c(djj, 0.0);
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

pub fn is_posdef(m: &Hermitian) -> PosDef {
    let positive = cholesky(m).is_ok();
    let evs = m.eigenvalues();
    let min_eigenvalue = evs.first().copied().unwrap_or(f64::INFINITY);
    let max_abs = evs.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let ill_conditioned = positive
        && (min_eigenvalue < CONDITIONING_FLOOR || min_eigenvalue < CONDITIONING_FLOOR * max_abs);
    PosDef {
        positive,
        min_eigenvalue,
        ill_conditioned,
    }
}

/// Principal square root of a Hermitian positive definite matrix.
pub fn herm_sqrt(m: &Hermitian) -> Result<Hermitian> {
    require_posdef(m, "herm_sqrt")?;
    Ok(Hermitian::symmetrize(m.spectral_map(f64::sqrt)))
}

/// Inverse of the principal square root.
pub fn herm_inv_sqrt(m: &Hermitian) -> Result<Hermitian> {
    require_posdef(m, "herm_inv_sqrt")?;
    Ok(Hermitian::symmetrize(m.spectral_map(|l| 1.0 / l.sqrt())))
}

fn require_posdef(m: &Hermitian, context: &'static str) -> Result<()> {
    let pd = is_posdef(m);
    if !pd.positive {
        return Err(Error::NotPositiveDefinite {
            context,
            min_eigenvalue: pd.min_eigenvalue,
        });
    }
    Ok(())
}

/// Solves `S X = B` for Hermitian positive definite `S` by Cholesky.
pub fn solve_hpd(s: &Hermitian, b: &CMatrix) -> Result<CMatrix> {
    if b.nrows() != s.dim() {
        return Err(Error::Dimension {
            context: "solve_hpd",
            expected: format!("{} rows", s.dim()),
            found: format!("{} rows", b.nrows()),
        });
    }
    let l = cholesky(s).map_err(|_| Error::NotPositiveDefinite {
        context: "solve_hpd",
        min_eigenvalue: s.min_eigenvalue(),
    })?;
    let n = s.dim();
    let mut x = b.clone();
    for col in 0..x.ncols() {
        // L y = b
        for i in 0..n {
            let mut acc = x[(i, col)];
            for k in 0..i {
                acc -= l[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = acc / l[(i, i)];
        }
        // L* x = y
        for i in (0..n).rev() {
            let mut acc = x[(i, col)];
            for k in (i + 1)..n {
                acc -= l[(k, i)].conj() * x[(k, col)];
            }
            x[(i, col)] = acc / l[(i, i)];
        }
    }
    Ok(x)
}

/// Inverse of a Hermitian positive definite matrix.
pub fn inv_hpd(s: &Hermitian) -> Result<Hermitian> {
    solve_hpd(s, &identity(s.dim())).map(Hermitian::symmetrize)
}

/// Inverse of a general square matrix via LU.
pub fn inv(m: &CMatrix) -> Result<CMatrix> {
    check_square(m, "inv")?;
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Invalid("matrix is singular".into()))
}

/// Smallest singular value.
pub fn sigma_min(m: &CMatrix) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Copies rows `r0..r0+nr`, cols `c0..c0+nc`.
pub fn block(m: &CMatrix, r0: usize, c0: usize, nr: usize, nc: usize) -> CMatrix {
    m.view((r0, c0), (nr, nc)).into_owned()
}

pub fn set_block(m: &mut CMatrix, r0: usize, c0: usize, b: &CMatrix) {
    m.view_mut((r0, c0), (b.nrows(), b.ncols())).copy_from(b);
}

/// `[[a, b], [c, d]]` from four equally-shaped blocks.
pub fn block2x2(a: &CMatrix, b: &CMatrix, cc: &CMatrix, d: &CMatrix) -> CMatrix {
    let (r, k) = (a.nrows(), a.ncols());
    let mut m = zeros(r + cc.nrows(), k + b.ncols());
    set_block(&mut m, 0, 0, a);
    set_block(&mut m, 0, k, b);
    set_block(&mut m, r, 0, cc);
    set_block(&mut m, r, k, d);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| {
            c(
                rng.random_range(-1.0..1.0) * scale,
                rng.random_range(-1.0..1.0) * scale,
            )
        })
    }

    fn random_hpd(rng: &mut ChaCha8Rng, n: usize) -> Hermitian {
        let g = random_matrix(rng, n, 1.0);
        Hermitian::symmetrize(&g * g.adjoint() + identity(n).scale(0.5))
    }

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(mat_exp(&zeros(2, 2)).unwrap(), identity(2));
    }

    #[test]
    fn exp_of_nilpotent_terminates() {
        let m = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let e = mat_exp(&m).unwrap();
        let expected = real_matrix(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!((e - expected).norm() < 1e-15);
    }

    #[test]
    fn exp_of_diagonal() {
        let (a, b) = (c(0.3, -2.0), c(-4.5, 0.25));
        let e = mat_exp(&diag(&[a, b])).unwrap();
        let expected = diag(&[a.exp(), b.exp()]);
        assert!((e - &expected).norm() <= 1e-13 * expected.norm());
    }

    #[test]
    fn exp_large_norm_diagonal_relative_accuracy() {
        let m = diag(&[c(-600.0, 300.0), c(-700.0, -100.0), c(-650.0, 20.0)]);
        let e = mat_exp(&m).unwrap();
        for i in 0..3 {
            let want = m[(i, i)].exp();
            assert!((e[(i, i)] - want).norm() <= 1e-12 * want.norm());
        }
    }

    #[test]
    fn exp_rejects_bad_input() {
        assert!(matches!(
            mat_exp(&zeros(2, 3)),
            Err(Error::Dimension { .. })
        ));
        let mut m = zeros(2, 2);
        m[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(mat_exp(&m), Err(Error::NonFinite(_))));
    }

    #[test]
    fn exp_inverse_and_adjoint_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.random_range(1..6);
            let scale = rng.random_range(0.1..10.0) / n as f64;
            let m = random_matrix(&mut rng, n, scale);
            let e = mat_exp(&m).unwrap();
            let einv = mat_exp(&(-&m)).unwrap();
            assert!((&e * &einv - identity(n)).norm() < 1e-10);
            let eadj = mat_exp(&m.adjoint()).unwrap();
            assert!((eadj - e.adjoint()).norm() <= 1e-12 * (1.0 + e.norm()));
        }
    }

    #[test]
    fn herm_sqrt_examples() {
        let r = herm_sqrt(&Hermitian::identity(3)).unwrap();
        assert!((r.as_matrix() - identity(3)).norm() < 1e-15);
        let r = herm_sqrt(&Hermitian::from_real_diagonal(&[4.0, 9.0])).unwrap();
        let want = real_matrix(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        assert!((r.as_matrix() - want).norm() < 1e-14);
    }

    #[test]
    fn herm_sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..7 {
            let m = random_hpd(&mut rng, n);
            let r = herm_sqrt(&m).unwrap();
            assert!(is_posdef(&r).positive);
            let r2 = r.as_matrix() * r.as_matrix();
            assert!((r2 - m.as_matrix()).norm() <= 1e-12 * m.norm());
            let ri = herm_inv_sqrt(&m).unwrap();
            assert!((ri.as_matrix() * r.as_matrix() - identity(n)).norm() < 1e-11);
        }
    }

    #[test]
    fn herm_sqrt_rejects_indefinite() {
        let m = Hermitian::from_real_diagonal(&[1.0, -2.0]);
        match herm_sqrt(&m) {
            Err(Error::NotPositiveDefinite { min_eigenvalue, .. }) => {
                assert!((min_eigenvalue + 2.0).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn posdef_examples() {
        assert!(is_posdef(&Hermitian::identity(4)).positive);
        let indefinite = is_posdef(&Hermitian::from_real_diagonal(&[1.0, -1.0]));
        assert!(!indefinite.positive);
        assert!(indefinite.min_eigenvalue < 0.0);
        let tiny = is_posdef(&Hermitian::from_real_diagonal(&[1e-14]));
        assert!(tiny.positive);
        assert!(tiny.ill_conditioned);
        assert!((tiny.min_eigenvalue - 1e-14).abs() < 1e-28);
    }

    #[test]
    fn hermitian_rejects_asymmetry_and_symmetrizes_drift() {
        let m = real_matrix(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(
            Hermitian::new(m),
            Err(Error::NotHermitian { .. })
        ));
        let mut m = real_matrix(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        m[(0, 1)] += c(1e-13, 0.0);
        let h = Hermitian::new(m).unwrap();
        assert_eq!(h[(0, 1)], h[(1, 0)].conj());
    }

    #[test]
    fn solve_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = random_matrix(&mut rng, 3, 1.0);
        let x = solve_hpd(&Hermitian::identity(3), &b).unwrap();
        assert!((x - &b).norm() < 1e-15);

        let s = Hermitian::from_real_diagonal(&[2.0, 4.0]);
        let x = solve_hpd(&s, &identity(2)).unwrap();
        assert!((x - real_matrix(2, 2, &[0.5, 0.0, 0.0, 0.25])).norm() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn solve_residual_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..7 {
            let s = random_hpd(&mut rng, n);
            let b = CMatrix::from_fn(n, 3, |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let x = solve_hpd(&s, &b).unwrap();
            let cond = s.eigenvalues().last().unwrap() / s.min_eigenvalue();
            assert!((s.as_matrix() * x - &b).norm() <= 1e-12 * b.norm() * cond.max(1.0));
        }
    }

    #[test]
    fn solve_rejects_indefinite_and_bad_shape() {
        let s = Hermitian::from_real_diagonal(&[1.0, -1.0]);
        assert!(matches!(
            solve_hpd(&s, &identity(2)),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(matches!(
            solve_hpd(&Hermitian::identity(2), &identity(3)),
            Err(Error::Dimension { .. })
        ));
    }
}
