use crate::error::{Error, Result};
use crate::linalg::{herm_inv_sqrt, herm_sqrt, is_posdef, set_block, zeros, CMatrix, Hermitian, C64};

/// Sequences `C(k) ≻ 0`, `Q(k)` for `k = 1..=N+1` with `C(k)Q(k)* = Q(k)C(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiData {
    c: Vec<Hermitian>,
    q: Vec<CMatrix>,
}

impl JacobiData {
    /// `c[k-1] = C(k)`, `q[k-1] = Q(k)`; both of length `N + 1`.
    pub fn new(c: Vec<Hermitian>, q: Vec<CMatrix>, id_tol: f64) -> Result<Self> {
        if c.len() != q.len() || c.len() < 2 {
            return Err(Error::Dimension {
                context: "Jacobi data",
                expected: "C and Q of equal length >= 2".into(),
                found: format!("{} and {}", c.len(), q.len()),
            });
        }
        let h = c[0].dim();
        for (k, (ck, qk)) in c.iter().zip(&q).enumerate() {
            if ck.dim() != h || qk.nrows() != h || qk.ncols() != h {
                return Err(Error::Dimension {
                    context: "Jacobi data",
                    expected: format!("{h}x{h} blocks"),
                    found: format!("block {} of size {}x{}", k + 1, qk.nrows(), qk.ncols()),
                });
            }
            let pd = is_posdef(ck);
            if !pd.positive {
                return Err(Error::NotPositiveDefinite {
                    context: "C(k)",
                    min_eigenvalue: pd.min_eigenvalue,
                });
            }
            let residual = commutation_residual(ck, qk);
            let tolerance = id_tol * (1.0 + ck.norm() * qk.norm());
            if residual > tolerance {
                return Err(Error::Identity {
                    condition: "commutation C(k)Q(k)* = Q(k)C(k)",
                    residual,
                    tolerance,
                });
            }
        }
        Ok(Self { c, q })
    }

    /// `C ≡ I`, `Q ≡ 0`.
    pub fn free(h: usize, truncation: usize) -> Self {
        Self {
            c: vec![Hermitian::identity(h); truncation + 1],
            q: vec![zeros(h, h); truncation + 1],
        }
    }

    pub fn h(&self) -> usize {
        self.c[0].dim()
    }

    /// `N`: number of block rows kept after truncation.
    pub fn truncation(&self) -> usize {
        self.c.len() - 1
    }

    /// `C(k)`, 1-based.
    pub fn c(&self, k: usize) -> &Hermitian {
        &self.c[k - 1]
    }

    /// `Q(k)`, 1-based.
    pub fn q(&self, k: usize) -> &CMatrix {
        &self.q[k - 1]
    }

    pub fn cs(&self) -> &[Hermitian] {
        &self.c
    }

    pub fn qs(&self) -> &[CMatrix] {
        &self.q
    }
}

pub fn commutation_residual(c: &CMatrix, q: &CMatrix) -> f64 {
    (c * q.adjoint() - q * c).norm()
}

/// Truncated block tridiagonal matrix with rows `k = 1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockJacobi {
    a: Vec<CMatrix>,
    b: Vec<CMatrix>,
}

impl BlockJacobi {
    /// `a_k = -i C(k)^{-1/2} C(k+1)^{1/2}`, `b_k = C(k)^{-1/2} Q(k) C(k)^{1/2}`
    /// for `k = 1..=N`, where `cs` has `N + 1` entries and `qs` at least `N`.
    pub fn from_sequences(cs: &[Hermitian], qs: &[CMatrix]) -> Result<Self> {
        let n = cs.len() - 1;
        let roots: Vec<Hermitian> = cs.iter().map(herm_sqrt).collect::<Result<_>>()?;
        let inv_roots: Vec<Hermitian> = cs.iter().map(herm_inv_sqrt).collect::<Result<_>>()?;
        let minus_i = C64::new(0.0, -1.0);
        let a = (0..n)
            .map(|k| inv_roots[k].as_matrix() * roots[k + 1].as_matrix() * minus_i)
            .collect();
        let b = (0..n)
            .map(|k| inv_roots[k].as_matrix() * &qs[k] * roots[k].as_matrix())
            .collect();
        Ok(Self { a, b })
    }

    pub fn truncation(&self) -> usize {
        self.b.len()
    }

    pub fn h(&self) -> usize {
        self.b[0].nrows()
    }

    /// `a_k`, `k = 1..=N`.
    pub fn a(&self, k: usize) -> &CMatrix {
        &self.a[k - 1]
    }

    /// `b_k`, `k = 1..=N`.
    pub fn b(&self, k: usize) -> &CMatrix {
        &self.b[k - 1]
    }

    /// `c_k = a_{k-1}*`, `k = 2..=N`.
    pub fn c(&self, k: usize) -> CMatrix {
        self.a[k - 2].adjoint()
    }

    /// `‖b_k - b_k*‖` for `k = 1..=N`.
    pub fn hermitian_residuals(&self) -> Vec<f64> {
        self.b.iter().map(|b| (b - b.adjoint()).norm()).collect()
    }

    /// Row `k` of the truncated product `J Y` (1-based, `y[k-1] = y_k`).
    pub fn apply_row(&self, k: usize, y: &[CMatrix]) -> CMatrix {
        let mut out = self.b(k) * &y[k - 1];
        if k > 1 {
            out += self.c(k) * &y[k - 2];
        }
        if k < self.truncation() {
            out += self.a(k) * &y[k];
        }
        out
    }

    /// Dense `Nh × Nh` matrix.
    pub fn to_dense(&self) -> CMatrix {
        let (n, h) = (self.truncation(), self.h());
        let mut m = zeros(n * h, n * h);
        for k in 1..=n {
            let r = (k - 1) * h;
            set_block(&mut m, r, r, self.b(k));
            if k < n {
                set_block(&mut m, r, r + h, self.a(k));
                set_block(&mut m, r + h, r, &self.c(k + 1));
            }
        }
        m
    }
}

/// Initial Jacobi matrix built from `C(k)`, `Q(k)`.
pub fn build_initial_jacobi(data: &JacobiData) -> Result<BlockJacobi> {
    BlockJacobi::from_sequences(data.cs(), data.qs())
}
