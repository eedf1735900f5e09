use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid car '{car}': {reason}")]
    InvalidCar { car: String, reason: String },

    #[error("car '{car}': required time slots not compatible with charging unit (slot {slot} >= {time_slots})")]
    SlotOutOfRange {
        car: String,
        slot: usize,
        time_slots: usize,
    },

    #[error("invalid charging unit: {0}")]
    InvalidUnit(String),

    #[error("invalid instance at {location}: {reason}")]
    InvalidInstance { location: String, reason: String },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("entry {index} is not binary")]
    NotBinary { index: usize },

    #[error("invalid program: {0}")]
    InvalidProgram(String),

    #[error("penalty must be nonnegative, got {0}")]
    NegativePenalty(f64),

    #[error("variable '{name}': fixed width {width} cannot represent range 0..={range}")]
    WidthTooSmall { name: String, width: u32, range: i64 },

    #[error("state is not normalized (total weight {0})")]
    NotNormalized(f64),

    #[error("qubit count mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("program has no feasible point")]
    Infeasible,

    #[error("no penalty up to {0} yields only feasible minimizers")]
    NoFeasiblePenalty(f64),

    #[error("objective returned a non-finite value at evaluation {0}")]
    NonFinite(usize),

    #[error("invalid coupling map: {0}")]
    InvalidCouplingMap(String),

    #[error("coupling map is disconnected")]
    Disconnected,

    #[error("invalid readout noise model: {0}")]
    InvalidNoise(String),

    #[error("confusion matrix of qubit {0} is singular (p01 + p10 = 1)")]
    SingularConfusion(usize),

    #[error("bit order mismatch: {0}")]
    BitOrderMismatch(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid bitstring '{0}'")]
    InvalidBitstring(String),

    #[error("invalid experiment record: {0}")]
    InvalidRecord(String),

    #[error("unsupported record schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by instance size rather than invalid input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::ResourceCap(_))
    }
}
