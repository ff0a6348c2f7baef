use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid rational literal {0:?}")]
    ParseRat(String),

    #[error("label {0:?} is already used by the model")]
    DuplicateLabel(String),

    #[error("no basis label {0:?} in the model")]
    UnknownLabel(String),

    #[error("no curve named {0:?} in the registry")]
    UnknownCurve(String),

    #[error("curve {0:?} is not flagged rational; supply its normal bundle degree explicitly")]
    NormalDegreeUnavailable(String),

    #[error("model {model:?} declares no nef-test generators")]
    NoNefGenerators { model: String },

    #[error("pullback on H^(2,2) can only be derived by duality for involutions")]
    NotAnInvolution,

    #[error("map {0:?} carries no H^(2,2) pullback matrix")]
    MissingPullback22(String),

    #[error("class is not in the span of the exceptional divisors")]
    NotInExceptionalSpan,

    #[error("blown-up model is not the parent extended by the given step: {0}")]
    StepMismatch(String),

    #[error("blowdown defect formula disagrees with the ring computation: formula {formula}, ring {ring}")]
    DefectMismatch { formula: String, ring: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
