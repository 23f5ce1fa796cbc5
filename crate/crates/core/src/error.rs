use thiserror::Error;

/// Everything that can go wrong while building or checking a transformation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("{context} is not Hermitian: asymmetry {asymmetry:.3e} exceeds {tolerance:.3e}")]
    NotHermitian {
        context: &'static str,
        asymmetry: f64,
        tolerance: f64,
    },

    #[error("{context} is not positive definite (smallest eigenvalue {min_eigenvalue:.6e})")]
    NotPositiveDefinite {
        context: &'static str,
        min_eigenvalue: f64,
    },

    #[error("{condition} violated: residual {residual:.6e} exceeds {tolerance:.6e}")]
    Identity {
        condition: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error(
        "integration drift {drift:.3e} exceeds {tolerance:.3e}; retry with step <= {suggested_step:.3e}"
    )]
    Accuracy {
        drift: f64,
        tolerance: f64,
        suggested_step: f64,
    },

    #[error("S(x) is singular or indefinite at sample {sample} (x = {x}); smallest eigenvalue {min_eigenvalue:.6e}")]
    Singular {
        sample: usize,
        x: f64,
        min_eigenvalue: f64,
    },

    #[error("spectral parameter lies within {distance:.3e} of the spectrum of A (guard {guard:.3e})")]
    NearSpectrum { distance: f64, guard: f64 },

    #[error("boundary condition [I 0]Π₀* = 0 violated: ‖[I 0]Π₀*‖ = {norm:.6e} (allowed {tolerance:.3e})")]
    BoundaryCondition { norm: f64, tolerance: f64 },

    #[error("Jordan spectrum is empty")]
    EmptySpectrum,

    #[error("no similarity matrix available: {0}")]
    MissingSimilarity(String),

    #[error("growth fit needs {0}")]
    InsufficientSamples(String),

    #[error("norm sample {index} is not positive ({value:e})")]
    NonPositiveNorm { index: usize, value: f64 },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
