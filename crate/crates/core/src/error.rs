use thiserror::Error;

/// Errors raised across the library, tagged by the module that produced them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("geom: degenerate axis, endpoints coincide")]
    DegenerateAxis,
    #[error("geom: singular matrix (det = {0:e})")]
    SingularMatrix(f64),
    #[error("geom: point outside model domain: {0}")]
    OutOfDomain(String),

    #[error("fields: sample not positive definite on chart {chart} at index {index}")]
    NotPositiveDefinite { chart: String, index: usize },
    #[error("fields: singular morphism on chart {chart} at index {index}")]
    SingularMorphism { chart: String, index: usize },
    #[error("fields: operator not self-adjoint on chart {chart} at index {index} (residual {residual:e})")]
    NotSelfAdjoint { chart: String, index: usize, residual: f64 },
    #[error("fields: atlas mismatch: {0}")]
    AtlasMismatch(String),
    #[error("fields: invalid atlas: {0}")]
    InvalidAtlas(String),
    #[error("fields: invalid signature: {0}")]
    InvalidSignature(String),

    #[error("infinity: invalid differential: {0}")]
    InvalidDifferential(String),
    #[error("infinity: datum rejected, Condition (*) failed: {0}")]
    RejectedDatum(String),

    #[error("family: singular leaf at parameter {param} on chart {chart} index {index}")]
    SingularLeaf { param: f64, chart: String, index: usize },

    #[error("foliation: curvature {k} outside attainable range ({lo}, {hi})")]
    OutOfRange { k: f64, lo: f64, hi: f64 },
    #[error("foliation: Newton solve on chart {chart} did not converge, residual history {history:?}")]
    NoConvergence { chart: String, history: Vec<f64> },
    #[error("foliation: rejected input: {0}")]
    RejectedInput(String),
    #[error("foliation: singular push, 1 + lambda tanh t = 0")]
    SingularPush,

    #[error("grafting: invalid word: {0}")]
    InvalidWord(String),
    #[error("grafting: invalid representation: {0}")]
    InvalidRepresentation(String),
    #[error("grafting: invalid multicurve: {0}")]
    InvalidMulticurve(String),

    #[error("schwarzian: critical point at z = {0}")]
    CriticalPoint(num_complex::Complex64),
    #[error("schwarzian: invalid germ: {0}")]
    InvalidGerm(String),

    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
