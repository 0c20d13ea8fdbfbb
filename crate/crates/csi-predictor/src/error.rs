use thiserror::Error;

#[derive(Debug, Error)]
pub enum PredictorError {
    #[error("quantizer needs at least 2 levels (got {0})")]
    TooFewLevels(usize),
    #[error("amplitude range must satisfy min < max (got [{0}, {1}])")]
    BadRange(f64, f64),
    #[error("stream of {len} samples is shorter than one {window}-sample window")]
    StreamTooShort { len: usize, window: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("prediction/truth lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {need} pilot carriers per transmitter, got {got}")]
    TooFewPilots { need: usize, got: usize },
    #[error("carrier {carrier} Hz outside the pilot span [{lo}, {hi}] Hz; refusing to extrapolate")]
    OutsidePilotSpan { carrier: f64, lo: f64, hi: f64 },
    #[error("spline nodes must be strictly increasing")]
    NonIncreasingNodes,
    #[error("training set has no samples")]
    EmptyTraining,
    #[error("class {class} has no training samples in some fold")]
    EmptyClass { class: usize },
    #[error("bad train configuration: {0}")]
    BadConfig(String),
    #[error("signal error: {0}")]
    Signal(#[from] signal_core::SignalError),
    #[error("sim error: {0}")]
    Sim(#[from] skin_sim::SimError),
    #[error("mimo error: {0}")]
    Mimo(#[from] mimo_math::MimoError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed checkpoint: {0}")]
    MalformedCheckpoint(String),
}
