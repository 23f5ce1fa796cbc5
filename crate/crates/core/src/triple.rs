//! Signature matrices and the generating parameter triple `(A, S(0), Π(0))`.

use crate::error::{Error, Result};
use crate::linalg::{block2x2, identity, is_finite, is_posdef, zeros, CMatrix, Hermitian, I};

/// Which of the two signature matrices is in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `j = [[0, I], [-I, 0]]`, identity `AS - SA* = Π j Π*`.
    Continuous,
    /// `j = [[0, I], [I, 0]]`, identity `AS - SA* = i Π j Π*`.
    Discrete,
}

/// The `2h × 2h` signature matrix `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignatureJ {
    pub variant: Variant,
    pub h: usize,
}

impl SignatureJ {
    pub fn new(variant: Variant, h: usize) -> Self {
        Self { variant, h }
    }

    pub fn matrix(&self) -> CMatrix {
        let h = self.h;
        let lower = match self.variant {
            Variant::Continuous => -identity(h),
            Variant::Discrete => identity(h),
        };
        block2x2(&zeros(h, h), &identity(h), &lower, &zeros(h, h))
    }

    /// Coefficient in front of `Π j Π*` in the generating identity.
    pub fn coupling(&self) -> num_complex::Complex64 {
        match self.variant {
            Variant::Continuous => num_complex::Complex64::new(1.0, 0.0),
            Variant::Discrete => I,
        }
    }
}

/// `‖A S - S A* - κ Π j Π*‖_F` with `κ` the coupling of `j`.
pub fn identity_residual(a: &CMatrix, s: &CMatrix, pi: &CMatrix, j: &SignatureJ) -> f64 {
    let lhs = a * s - s * a.adjoint();
    let rhs = (pi * j.matrix() * pi.adjoint()) * j.coupling();
    (lhs - rhs).norm()
}

/// Generators of the transformation.
///
/// `A` is `n × n`, `S(0)` is `n × n` Hermitian and `Π(0)` is `n × 2h`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterTriple {
    pub a: CMatrix,
    pub s0: Hermitian,
    pub pi0: CMatrix,
    pub j: SignatureJ,
}

impl ParameterTriple {
    pub fn new(a: CMatrix, s0: CMatrix, pi0: CMatrix, variant: Variant) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || n == 0 {
            return Err(Error::Dimension {
                context: "A",
                expected: "non-empty square matrix".into(),
                found: format!("{}x{}", a.nrows(), a.ncols()),
            });
        }
        if s0.nrows() != n || s0.ncols() != n {
            return Err(Error::Dimension {
                context: "S0",
                expected: format!("{n}x{n}"),
                found: format!("{}x{}", s0.nrows(), s0.ncols()),
            });
        }
        if pi0.nrows() != n || pi0.ncols() == 0 || !pi0.ncols().is_multiple_of(2) {
            return Err(Error::Dimension {
                context: "Pi0",
                expected: format!("{n}x2h"),
                found: format!("{}x{}", pi0.nrows(), pi0.ncols()),
            });
        }
        if !is_finite(&a) {
            return Err(Error::NonFinite("A"));
        }
        if !is_finite(&pi0) {
            return Err(Error::NonFinite("Pi0"));
        }
        let s0 = Hermitian::checked(s0, "S0")?;
        let h = pi0.ncols() / 2;
        Ok(Self {
            a,
            s0,
            pi0,
            j: SignatureJ::new(variant, h),
        })
    }

    pub fn continuous(a: CMatrix, s0: CMatrix, pi0: CMatrix) -> Result<Self> {
        Self::new(a, s0, pi0, Variant::Continuous)
    }

    pub fn discrete(a: CMatrix, s0: CMatrix, pi0: CMatrix) -> Result<Self> {
        Self::new(a, s0, pi0, Variant::Discrete)
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn h(&self) -> usize {
        self.j.h
    }

    /// Residual of the generating identity at the base point.
    pub fn residual(&self) -> f64 {
        identity_residual(&self.a, &self.s0, &self.pi0, &self.j)
    }

    /// Scale `1 + ‖A‖‖S(0)‖` against which the residual is judged.
    pub fn residual_scale(&self) -> f64 {
        1.0 + self.a.norm() * self.s0.norm()
    }

    /// Same triple with `Π(0)` replaced by zero.
    pub fn with_zero_pi(&self) -> Self {
        let mut t = self.clone();
        t.pi0.fill(num_complex::Complex64::new(0.0, 0.0));
        t
    }

    pub(crate) fn require_variant(&self, variant: Variant) -> Result<()> {
        if self.j.variant != variant {
            return Err(Error::Invalid(format!(
                "expected a {variant:?} triple, got {:?}",
                self.j.variant
            )));
        }
        Ok(())
    }

    pub(crate) fn require_s0_posdef(&self) -> Result<()> {
        let pd = is_posdef(&self.s0);
        if !pd.positive {
            return Err(Error::NotPositiveDefinite {
                context: "S0",
                min_eigenvalue: pd.min_eigenvalue,
            });
        }
        Ok(())
    }
}

/// Checks the continuous generating identity and returns its residual.
pub fn validate_triple(triple: &ParameterTriple, id_tol: f64) -> Result<f64> {
    triple.require_variant(Variant::Continuous)?;
    check_residual(triple, id_tol, "generating identity AS0 - S0A* = Pi0 j Pi0*")
}

/// Checks the discrete generating identity and positivity of `S0`.
pub fn validate_discrete_triple(triple: &ParameterTriple, id_tol: f64) -> Result<f64> {
    triple.require_variant(Variant::Discrete)?;
    triple.require_s0_posdef()?;
    check_residual(triple, id_tol, "generating identity AS0 - S0A* = i Pi0 j Pi0*")
}

fn check_residual(triple: &ParameterTriple, id_tol: f64, condition: &'static str) -> Result<f64> {
    let residual = triple.residual();
    let tolerance = id_tol * triple.residual_scale();
    if residual > tolerance {
        return Err(Error::Identity {
            condition,
            residual,
            tolerance,
        });
    }
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, real_matrix};

    fn row(values: &[num_complex::Complex64]) -> CMatrix {
        CMatrix::from_row_slice(1, values.len(), values)
    }

    #[test]
    fn signature_algebra() {
        for h in 1..4 {
            let jc = SignatureJ::new(Variant::Continuous, h).matrix();
            assert_eq!(jc.adjoint(), -&jc);
            assert_eq!(&jc * &jc, -identity(2 * h));
            let jd = SignatureJ::new(Variant::Discrete, h).matrix();
            assert_eq!(jd.adjoint(), jd);
            assert_eq!(&jd * &jd, identity(2 * h));
        }
    }

    #[test]
    fn continuous_examples() {
        let t = ParameterTriple::continuous(
            real_matrix(1, 1, &[2.0]),
            real_matrix(1, 1, &[1.0]),
            real_matrix(1, 2, &[1.0, 1.0]),
        )
        .unwrap();
        assert_eq!(validate_triple(&t, 1e-9).unwrap(), 0.0);

        let t = ParameterTriple::continuous(
            row(&[c(0.0, 1.0)]),
            real_matrix(1, 1, &[1.0]),
            row(&[c(0.0, 1.0), c(1.0, 0.0)]),
        )
        .unwrap();
        assert_eq!(validate_triple(&t, 1e-9).unwrap(), 0.0);

        let a = real_matrix(2, 2, &[1.0, 0.5, 0.5, -3.0]);
        let s0 = real_matrix(2, 2, &[4.0, -1.0, -1.0, 0.0]);
        let t = ParameterTriple::continuous(a.clone(), s0.clone(), zeros(2, 4)).unwrap();
        // A = A* commutes with nothing in particular, so pick S0 = f(A).
        let s0 = &a * &a + identity(2);
        let t2 = ParameterTriple::continuous(a, s0, zeros(2, 4)).unwrap();
        assert!(validate_triple(&t2, 1e-9).unwrap() < 1e-14);
        assert!(validate_triple(&t, 1e-9).is_err());

        let scalar = ParameterTriple::continuous(
            real_matrix(1, 1, &[3.0]),
            real_matrix(1, 1, &[5.0]),
            zeros(1, 2),
        )
        .unwrap();
        assert_eq!(validate_triple(&scalar, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn discrete_examples() {
        let t = ParameterTriple::discrete(
            row(&[c(0.0, 1.0)]),
            real_matrix(1, 1, &[1.0]),
            real_matrix(1, 2, &[1.0, 1.0]),
        )
        .unwrap();
        assert_eq!(validate_discrete_triple(&t, 1e-9).unwrap(), 0.0);

        let t = ParameterTriple::discrete(
            real_matrix(1, 1, &[2.0]),
            real_matrix(1, 1, &[1.0]),
            real_matrix(1, 2, &[0.0, 1.0]),
        )
        .unwrap();
        assert_eq!(validate_discrete_triple(&t, 1e-9).unwrap(), 0.0);

        let bad = ParameterTriple::discrete(
            real_matrix(1, 1, &[2.0]),
            real_matrix(1, 1, &[-1.0]),
            real_matrix(1, 2, &[0.0, 1.0]),
        )
        .unwrap();
        assert!(matches!(
            validate_discrete_triple(&bad, 1e-9),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn rejects_bad_dimensions() {
        let err = ParameterTriple::continuous(identity(2), identity(2), zeros(2, 3)).unwrap_err();
        assert!(matches!(err, Error::Dimension { context: "Pi0", .. }));
        let err = ParameterTriple::continuous(identity(2), identity(3), zeros(2, 2)).unwrap_err();
        assert!(matches!(err, Error::Dimension { context: "S0", .. }));
        let err = ParameterTriple::continuous(
            identity(2),
            real_matrix(2, 2, &[1.0, 1.0, 0.0, 1.0]),
            zeros(2, 2),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }
}
