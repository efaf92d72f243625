use thiserror::Error;

/// Errors raised anywhere in the geometry kernel, the linking engines or the
/// splitting calculus.
///
/// Every variant maps onto one of the CLI exit codes through [`Error::exit_code`]:
/// `1` for bad input, `2` for numerical failures, `3` for a slope mismatch.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("geometry error: {message} (minimum clearance {clearance:.6})")]
    Geometry { message: String, clearance: f64 },

    #[error("refinement error: {0}")]
    Refinement(String),

    #[error("placement error: {0}")]
    Placement(String),

    #[error("pushoff distance {epsilon} rejected ({reason}); try epsilon <= {suggested}")]
    Epsilon { epsilon: f64, suggested: f64, reason: String },

    #[error("no generic projection direction found after {attempts} attempts")]
    DegenerateProjection { attempts: usize },

    #[error("Gauss sum {raw:.6} is not within 0.1 of an integer")]
    Precision { raw: f64 },

    #[error("linking engines disagree: crossings = {crossings}, gauss = {gauss}")]
    EngineDisagreement { crossings: i64, gauss: i64 },

    #[error("pushoff identity violated: lk(a1,a2) = {lk_pushoffs}, lk(K,a1) = {lk_knot_a1}, lk(K,a2) = {lk_knot_a2}")]
    PushoffIdentity { lk_pushoffs: i64, lk_knot_a1: i64, lk_knot_a2: i64 },

    #[error("geometric slope {found} does not match the record slope {expected}")]
    GeometricMismatch { expected: i64, found: i64 },

    #[error("slope mismatch: {a} vs {b}; no common K-stabilization exists")]
    SlopeMismatch { a: i64, b: i64 },

    #[error("knot mismatch: {a} vs {b}")]
    KnotMismatch { a: String, b: String },

    #[error("manifold mismatch: {a} vs {b}")]
    ManifoldMismatch { a: String, b: String },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("gluing error: {0}")]
    Gluing(String),

    #[error("knot gluing along {label} lacks the annulus certificate on both sides")]
    AnnulusViolation { label: String },

    #[error("incomplete gluing: {0}")]
    IncompleteGluing(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SlopeMismatch { .. } => 3,
            Error::DegenerateProjection { .. }
            | Error::Precision { .. }
            | Error::EngineDisagreement { .. }
            | Error::PushoffIdentity { .. }
            | Error::GeometricMismatch { .. } => 2,
            _ => 1,
        }
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
