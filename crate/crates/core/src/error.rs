use thiserror::Error;

/// Errors produced by the library.
///
/// Validation problems (bad parameters, malformed input) are kept apart from
/// numerical-assertion failures so that front ends can map them to distinct
/// exit statuses.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("series shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("series has a nonzero constant term {0}")]
    NonZeroConstant(String),

    #[error("degree {degree} exceeds the cutoff {cutoff}")]
    DegreeOutOfRange { degree: usize, cutoff: usize },

    #[error("sigma = {sigma} is below the convergence floor {floor} for {what}")]
    Convergence {
        sigma: f64,
        floor: f64,
        what: String,
    },

    #[error("coefficient {key} has imaginary residue {residue:e} (limit {limit:e})")]
    Reality {
        key: String,
        residue: f64,
        limit: f64,
    },

    #[error("point with norm {norm} lies outside the validity radius {radius}")]
    OutsideRadius { norm: f64, radius: f64 },

    #[error("degenerate envelope fit: {0}")]
    DegenerateFit(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("truncation gate failed: tail sd {tail_sd:e} exceeds {limit:e}")]
    Gate { tail_sd: f64, limit: f64 },

    #[error("pole of zeta at s = 1")]
    Pole,

    #[error("requested precision is unreachable: {0}")]
    Precision(String),

    #[error("argument continuation failed at sigma = {sigma}, t = {t}")]
    Continuation { sigma: f64, t: f64 },

    #[error("exclusion rate {rate} exceeds the limit {limit}")]
    ExclusionRate { rate: f64, limit: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of numerical assertions rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Reality { .. }
                | Error::Precision(_)
                | Error::Continuation { .. }
                | Error::ExclusionRate { .. }
                | Error::DegenerateFit(_)
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
