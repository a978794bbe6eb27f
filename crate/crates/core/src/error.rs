use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("bracket entry ({i}, {j}) must have i < j")]
    BracketOrder { i: usize, j: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexRange { index: usize, dim: usize },

    #[error("Jacobi identity fails (max residual {residual:e})")]
    Jacobi { residual: f64 },

    #[error("almost-complex: J^2 != -Id (max residual {residual:e})")]
    AlmostComplex { residual: f64 },

    #[error("integrable: Nijenhuis tensor does not vanish (max residual {residual:e})")]
    NotIntegrable { residual: f64 },

    #[error("compatibility: g(J.,J.) != g (max residual {residual:e})")]
    Incompatible { residual: f64 },

    #[error("metric: matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("singular matrix")]
    Singular,

    #[error("structure is not locally conformally Kähler")]
    NotLcK,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("double extension: {0}")]
    InadmissibleExtension(String),

    #[error("point outside the model domain: {0}")]
    Domain(String),

    #[error("finite-difference step {step} too large (domain margin {margin})")]
    StepTooLarge { step: f64, margin: f64 },

    #[error("parse error in `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that mean "the input failed validation" as opposed to
    /// I/O or a failed downstream check.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
