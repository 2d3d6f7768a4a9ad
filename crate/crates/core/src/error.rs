use crate::qstate::Label;

/// Errors produced by the state algebra, the physics model and the protocols.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("label collision: kaon `{0}` appears in both operands")]
    DuplicateLabel(Label),
    #[error("label `{0}` is not part of the state")]
    MissingLabel(Label),
    #[error("label lists differ: {left:?} vs {right:?}")]
    LabelMismatch { left: Vec<Label>, right: Vec<Label> },
    #[error("state holds {0} kaons, at most {max} are supported", max = crate::qstate::MAX_KAONS)]
    TooManyKaons(usize),
    #[error("amplitude vector has length {got}, expected {expected}")]
    BadLength { got: usize, expected: usize },
    #[error("negative time interval {0}")]
    NegativeTime(f64),
    #[error("matrix is singular (|det| = {0:e})")]
    SingularMatrix(f64),
    #[error("outcome has zero probability")]
    ZeroProbability,
    #[error("state is not normalized: norm² = {0}")]
    NotNormalized(f64),
    #[error("invalid kinematics: {0}")]
    InvalidKinematics(String),
    #[error("invalid constants: {0}")]
    InvalidConstants(String),
    #[error("{0}")]
    InvalidSetup(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
