use thiserror::Error;

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("sample rate must be positive (got {0})")]
    BadSampleRate(f64),
    #[error("samples must be finite")]
    NonFiniteSample,
    #[error("frequency {freq} Hz violates Nyquist for sample rate {sample_rate} Hz")]
    NyquistViolation { freq: f64, sample_rate: f64 },
    #[error("bandpass spec invalid for sample rate {sample_rate} Hz: {reason}")]
    BadBandpassSpec { sample_rate: f64, reason: String },
    #[error("window [{start}, {start}+{len}) out of bounds for {available} samples")]
    WindowOutOfBounds {
        start: usize,
        len: usize,
        available: usize,
    },
    #[error("window of {len} samples is shorter than two cycles of {freq} Hz at {sample_rate} Hz")]
    WindowTooShort {
        len: usize,
        freq: f64,
        sample_rate: f64,
    },
    #[error("envelope must contain at least two samples")]
    EnvelopeTooShort,
    #[error("correlation threshold must lie strictly between 0 and 1 (got {0})")]
    BadThreshold(f64),
    #[error("hop must be positive")]
    ZeroHop,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed waveform file: {0}")]
    MalformedFile(String),
}
