use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {qubit_count} qubits")]
    QubitOutOfRange { index: usize, qubit_count: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("gate angle is not finite")]
    NonFiniteAngle,

    #[error("parameter slot {slot} is unbound")]
    UnboundParameter { slot: usize },

    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length {len} is not a power of two")]
    NonPowerOfTwoLength { len: usize },

    #[error("amplitude vector has norm {norm}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("zero-norm vector")]
    ZeroNorm,

    #[error("shot count must be positive")]
    ZeroShots,

    #[error("shots mode requires a seed")]
    MissingSeed,

    #[error("unsupported moment pair ({m},{l})")]
    UnsupportedMoments { m: u32, l: u32 },

    #[error("shift {r} out of range for {n} grid points")]
    ShiftOutOfRange { r: usize, n: usize },

    #[error("empty matrix")]
    EmptyMatrix,

    #[error("{0}")]
    InvalidArgument(String),

    #[error("solution blew up at step {step}")]
    BlowUp { step: usize },

    #[error("field parse error: {0}")]
    ParseField(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
