use thiserror::Error;

/// Errors raised by the state-vector engine, the transaction sampler and the
/// scenario layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("subsystem `{0}` appears in both operands")]
    SubsystemCollision(String),
    #[error("subsystem `{0}` is listed more than once")]
    DuplicateSubsystem(String),
    #[error("subsystem lists differ: {left:?} vs {right:?}")]
    SubsystemMismatch { left: Vec<String>, right: Vec<String> },
    #[error("unknown subsystem `{0}`")]
    UnknownSubsystem(String),
    #[error("subsystem `{0}` used for both sides of a two-party operation")]
    IdenticalSubsystems(String),
    #[error("new order is not a permutation of the current subsystems")]
    NotAPermutation,
    #[error("state has {0} subsystems; at most {max} are supported", max = crate::qcore::MAX_SUBSYSTEMS)]
    TooManySubsystems(usize),
    #[error("invalid amplitudes: {0}")]
    InvalidAmplitudes(String),
    #[error("invalid measurement basis: {0}")]
    InvalidBasis(String),
    #[error("unknown outcome `{0}`")]
    UnknownOutcome(String),
    #[error("outcome `{label}` has probability {probability:e}; cannot condition on it")]
    ImpossibleConditioning { label: String, probability: f64 },
    #[error("bipartition must be a nonempty proper subset of the subsystems")]
    TrivialBipartition,
    #[error("measurement axis has norm {0}, expected 1")]
    InvalidAxis(f64),
    #[error("absorber configuration is incomplete: deficit {deficit:.6}")]
    Incomplete { deficit: f64 },
    #[error("absorber `{0}` is listed more than once")]
    DuplicateAbsorber(String),
    #[error("invalid absorber `{id}`: {reason}")]
    InvalidAbsorber { id: String, reason: String },
    #[error("particle line `{0}` has no detector")]
    DanglingLine(String),
    #[error("particle line `{0}` is not emitted by any source")]
    UnsourcedLine(String),
    #[error("unknown graph node `{0}`")]
    UnknownNode(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("results come from different scenarios or configurations")]
    MixedResults,
    #[error("empty ensemble")]
    EmptyEnsemble,
    #[error("outcome labels do not match: {0}")]
    LabelMismatch(String),
    #[error("report output failed: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
