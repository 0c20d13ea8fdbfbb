use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("activity profile invalid: {0}")]
    BadProfile(String),
    #[error("latent update rate {rate} Hz too low for coherence target {coherence} s (need >= {min} Hz)")]
    RateTooLow { rate: f64, coherence: f64, min: f64 },
    #[error("scenario invalid: {0}")]
    BadScenario(String),
    #[error("pilot carrier {0} Hz assigned to more than one transmitter")]
    CarrierCollision(f64),
    #[error("unknown subject preset {0} (expected 1 or 2)")]
    UnknownSubject(u32),
    #[error("signal error: {0}")]
    Signal(#[from] signal_core::SignalError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed scenario file: {0}")]
    MalformedScenario(String),
    #[error("malformed truth file: {0}")]
    MalformedTruth(String),
}
