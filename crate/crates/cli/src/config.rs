//! JSON run configuration.
//!
//! Complex numbers are `[re, im]` pairs (a bare number is read as real) and
//! matrices are row-major nested arrays. Every field with a default is filled
//! in on load, so serializing a loaded config echoes the resolved settings.

use std::path::{Path, PathBuf};

use gbdt::asymptotics::JordanSpectrum;
use gbdt::continuous::{soliton_triple, Grid, Potential};
use gbdt::discrete::JacobiData;
use gbdt::{random, CMatrix, Hermitian, ParameterTriple, Tolerances, Variant, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Continuous,
    Discrete,
    Verify,
    Asymptotics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Real(f64),
    Complex([f64; 2]),
}

impl Number {
    fn value(self) -> C64 {
        match self {
            Number::Real(re) => C64::new(re, 0.0),
            Number::Complex([re, im]) => C64::new(re, im),
        }
    }
}

pub type Matrix = Vec<Vec<Number>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TripleSpec {
    Explicit { a: Matrix, s0: Matrix, pi0: Matrix },
    /// Seeded random triple; for the discrete mode the first block column of
    /// `Π₀` is zero so that the eigenvector construction applies.
    Random { n: usize, h: usize },
    /// `A = -κ²`, `S₀ = s0`, `Π₀ = [-κ, 1]`.
    Soliton { kappa: f64, s0: f64 },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    #[default]
    Zero,
    Constant { value: Matrix },
    Tabulated { x: Vec<f64>, values: Vec<Matrix> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum JacobiSpec {
    /// `C ≡ I`, `Q ≡ 0`.
    Free { truncation: usize },
    Random { truncation: usize },
    /// `c` and `q` list `C(k)`, `Q(k)` for `k = 1..=N+1`.
    Explicit { c: Vec<Matrix>, q: Vec<Matrix> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Ode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub length: f64,
    pub step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            length: 5.0,
            step: 1e-3,
        }
    }
}

/// Jordan blocks `[[λ, size], …]`, with an optional similarity `U`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JordanSpec {
    pub blocks: Vec<(Number, usize)>,
    #[serde(default)]
    pub similarity: Option<Matrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tols {
    pub id_tol: f64,
    pub pde_tol: f64,
    pub quad_tol: f64,
    pub spectral_guard: f64,
    pub eig_tol: f64,
    /// Central-difference residual of the time-dependent equation.
    pub fd_tol: f64,
    /// Agreement of the integrated and closed-form orbits.
    pub ode_tol: f64,
    pub soliton_amplitude_tol: f64,
    pub soliton_fit_tol: f64,
    pub fit_tau_tol: f64,
    pub fit_r_tol: f64,
}

impl Default for Tols {
    fn default() -> Self {
        let lib = Tolerances::default();
        Self {
            id_tol: lib.id_tol,
            pde_tol: lib.pde_tol,
            quad_tol: lib.quad_tol,
            spectral_guard: lib.spectral_guard,
            eig_tol: lib.eig_tol,
            fd_tol: 1e-4,
            ode_tol: 1e-8,
            soliton_amplitude_tol: 1e-6,
            soliton_fit_tol: 1e-8,
            fit_tau_tol: 1e-2,
            fit_r_tol: 0.1,
        }
    }
}

impl Tols {
    /// Every tolerance multiplied by `factor`; the spectral guard is a
    /// distance, not a tolerance, and is left alone.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            id_tol: self.id_tol * factor,
            pde_tol: self.pde_tol * factor,
            quad_tol: self.quad_tol * factor,
            spectral_guard: self.spectral_guard,
            eig_tol: self.eig_tol * factor,
            fd_tol: self.fd_tol * factor,
            ode_tol: self.ode_tol * factor,
            soliton_amplitude_tol: self.soliton_amplitude_tol * factor,
            soliton_fit_tol: self.soliton_fit_tol * factor,
            fit_tau_tol: self.fit_tau_tol * factor,
            fit_r_tol: self.fit_r_tol * factor,
        }
    }

    pub fn library(&self) -> Tolerances {
        Tolerances {
            id_tol: self.id_tol,
            pde_tol: self.pde_tol,
            quad_tol: self.quad_tol,
            spectral_guard: self.spectral_guard,
            eig_tol: self.eig_tol,
        }
    }
}

fn default_times() -> Vec<f64> {
    vec![0.0, 0.5, 1.0]
}

fn default_g_count() -> usize {
    5
}

fn default_quorum() -> f64 {
    0.8
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub triple: Option<TripleSpec>,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub method: Option<Method>,
    #[serde(default)]
    pub ode_step: Option<f64>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    #[serde(default)]
    pub jacobi: Option<JacobiSpec>,
    #[serde(default)]
    pub jordan: Option<JordanSpec>,
    /// Vectors `g` for the growth fit; seeded random vectors when absent.
    #[serde(default)]
    pub g: Option<Vec<Vec<Number>>>,
    #[serde(default = "default_g_count")]
    pub g_count: usize,
    /// Fraction of the `g` vectors whose fit must land within tolerance.
    #[serde(default = "default_quorum")]
    pub fit_quorum: f64,
    #[serde(default)]
    pub tolerances: Tols,
    #[serde(default = "default_scale")]
    pub tol_scale: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }

    /// Fills the defaults that depend on other fields and checks the ones
    /// that do not need any numerical work.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let invalid = |msg: String| Err(CliError::Validation(msg));
        if !(self.tol_scale.is_finite() && self.tol_scale > 0.0) {
            return invalid(format!("tol_scale must be positive, got {}", self.tol_scale));
        }
        if self.times.iter().any(|t| !t.is_finite()) {
            return invalid("times must be finite".into());
        }
        match self.mode {
            Mode::Verify => {
                if self.tol_scale != 1.0 {
                    return invalid("tol_scale does not apply to verify mode".into());
                }
            }
            Mode::Continuous | Mode::Asymptotics => {
                if self.triple.is_none() {
                    return invalid("a triple is required".into());
                }
                let method = match (self.method, self.potential == PotentialSpec::Zero) {
                    (Some(Method::ClosedForm), false) => {
                        return invalid("the closed form needs a zero potential; use method \"ode\"".into())
                    }
                    (Some(m), _) => m,
                    (None, true) => Method::ClosedForm,
                    (None, false) => Method::Ode,
                };
                self.method = Some(method);
                if method == Method::Ode {
                    let step = self.ode_step.unwrap_or(self.grid.step);
                    if !(step.is_finite() && step > 0.0) {
                        return invalid(format!("ode_step must be positive, got {step}"));
                    }
                    self.ode_step = Some(step);
                }
                if self.mode == Mode::Asymptotics && self.potential != PotentialSpec::Zero {
                    return invalid("asymptotics mode needs a zero potential".into());
                }
            }
            Mode::Discrete => {
                if self.triple.is_none() {
                    return invalid("a triple is required".into());
                }
                if self.jacobi.is_none() {
                    return invalid("discrete mode needs a jacobi specification".into());
                }
            }
        }
        if self.mode == Mode::Asymptotics {
            if let Some(g) = &self.g {
                self.g_count = g.len();
            }
            if self.g_count == 0 {
                return invalid("at least one vector g is needed".into());
            }
            if !(self.fit_quorum > 0.0 && self.fit_quorum <= 1.0) {
                return invalid(format!("fit_quorum must lie in (0, 1], got {}", self.fit_quorum));
            }
        }
        Ok(self)
    }

    pub fn effective_tolerances(&self) -> Tols {
        self.tolerances.scaled(self.tol_scale)
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Ok(Grid::uniform(self.grid.length, self.grid.step)?)
    }

    pub fn rng(&self) -> random::SeededRng {
        random::rng(self.seed)
    }

    pub fn triple(&self, variant: Variant, rng: &mut random::SeededRng) -> Result<ParameterTriple, CliError> {
        let spec = self
            .triple
            .as_ref()
            .ok_or_else(|| CliError::Validation("a triple is required".into()))?;
        let triple = match spec {
            TripleSpec::Explicit { a, s0, pi0 } => ParameterTriple::new(
                matrix(a, "A")?,
                matrix(s0, "S0")?,
                matrix(pi0, "Pi0")?,
                variant,
            )?,
            TripleSpec::Random { n, h } => {
                if *n == 0 || *h == 0 {
                    return Err(CliError::Validation("random triple needs n, h >= 1".into()));
                }
                match variant {
                    Variant::Continuous => random::triple(rng, variant, *n, *h)?,
                    Variant::Discrete => random::boundary_triple(rng, *n, *h)?,
                }
            }
            TripleSpec::Soliton { kappa, s0 } => {
                if variant != Variant::Continuous {
                    return Err(CliError::Validation("the soliton triple is continuous".into()));
                }
                soliton_triple(*kappa, *s0)?
            }
        };
        let tol = self.effective_tolerances().id_tol;
        match variant {
            Variant::Continuous => gbdt::validate_triple(&triple, tol)?,
            Variant::Discrete => gbdt::validate_discrete_triple(&triple, tol)?,
        };
        Ok(triple)
    }

    pub fn potential(&self, h: usize) -> Result<Potential, CliError> {
        let check_dim = |m: &Hermitian| {
            if m.dim() == h {
                Ok(())
            } else {
                Err(CliError::Validation(format!(
                    "potential blocks must be {h}x{h}, found {0}x{0}",
                    m.dim()
                )))
            }
        };
        match &self.potential {
            PotentialSpec::Zero => Ok(Potential::zero(h)),
            PotentialSpec::Constant { value } => {
                let v = Hermitian::checked(matrix(value, "potential")?, "potential")?;
                check_dim(&v)?;
                Ok(Potential::constant(v, self.grid.length)?)
            }
            PotentialSpec::Tabulated { x, values } => {
                let values = values
                    .iter()
                    .map(|m| {
                        let v = Hermitian::checked(matrix(m, "potential")?, "potential")?;
                        check_dim(&v)?;
                        Ok(v)
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                Ok(Potential::tabulated(x.clone(), values)?)
            }
        }
    }

    pub fn jacobi(&self, h: usize, rng: &mut random::SeededRng) -> Result<JacobiData, CliError> {
        let spec = self
            .jacobi
            .as_ref()
            .ok_or_else(|| CliError::Validation("discrete mode needs a jacobi specification".into()))?;
        let need_truncation = |n: usize| {
            if n < 2 {
                Err(CliError::Validation(format!("truncation must be at least 2, got {n}")))
            } else {
                Ok(n)
            }
        };
        match spec {
            JacobiSpec::Free { truncation } => Ok(JacobiData::free(h, need_truncation(*truncation)?)),
            JacobiSpec::Random { truncation } => Ok(random::jacobi_data(rng, h, need_truncation(*truncation)?)?),
            JacobiSpec::Explicit { c, q } => {
                let cs = c
                    .iter()
                    .map(|m| Ok(Hermitian::checked(matrix(m, "C(k)")?, "C(k)")?))
                    .collect::<Result<Vec<_>, CliError>>()?;
                let qs = q.iter().map(|m| matrix(m, "Q(k)")).collect::<Result<Vec<_>, _>>()?;
                need_truncation(cs.len().saturating_sub(1))?;
                Ok(JacobiData::new(cs, qs, self.effective_tolerances().id_tol)?)
            }
        }
    }

    pub fn jordan(&self, a: &CMatrix) -> Result<JordanSpectrum, CliError> {
        let Some(spec) = &self.jordan else {
            return Ok(JordanSpectrum::from_matrix(a)?);
        };
        let blocks: Vec<(C64, usize)> = spec.blocks.iter().map(|&(l, k)| (l.value(), k)).collect();
        let declared = match &spec.similarity {
            Some(u) => JordanSpectrum::declared_with_similarity(
                blocks,
                matrix(u, "similarity")?,
                a,
                self.effective_tolerances().id_tol,
            )?,
            None => JordanSpectrum::declared(blocks)?,
        };
        if declared.n() != a.nrows() {
            return Err(CliError::Validation(format!(
                "Jordan blocks add up to {}, but A is {}x{}",
                declared.n(),
                a.nrows(),
                a.ncols()
            )));
        }
        Ok(declared)
    }

    pub fn g_vectors(&self, n: usize, rng: &mut random::SeededRng) -> Result<Vec<gbdt::linalg::CVector>, CliError> {
        match &self.g {
            Some(gs) => gs
                .iter()
                .map(|g| {
                    if g.len() != n {
                        return Err(CliError::Validation(format!("g must have length {n}, found {}", g.len())));
                    }
                    Ok(gbdt::linalg::CVector::from_iterator(n, g.iter().map(|z| z.value())))
                })
                .collect(),
            None => Ok((0..self.g_count)
                .map(|_| random::complex_matrix(rng, n, 1).column(0).into_owned())
                .collect()),
        }
    }
}

fn matrix(rows: &Matrix, name: &str) -> Result<CMatrix, CliError> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return Err(CliError::Validation(format!("{name} is empty")));
    }
    if rows.iter().any(|row| row.len() != c) {
        return Err(CliError::Validation(format!("{name} has rows of unequal length")));
    }
    let entries: Vec<C64> = rows.iter().flatten().map(|z| z.value()).collect();
    if entries.iter().any(|z| !z.is_finite()) {
        return Err(CliError::Validation(format!("{name} has a non-finite entry")));
    }
    Ok(CMatrix::from_row_slice(r, c, &entries))
}
