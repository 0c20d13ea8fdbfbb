//! Deterministic DSP primitives for narrowband vibration links.
//!
//! The currency of this crate is [`Waveform`], a uniformly sampled real
//! time series. On top of it sit sinusoid synthesis, linear-phase FIR
//! bandpass filtering (Kaiser windowed sinc), least-squares single-frequency
//! amplitude/phase estimation, envelope extraction, and autocorrelation-based
//! coherence-time estimation.
//!
//! Everything is a pure function of its inputs and safe to use from
//! data-parallel batch code.

mod coherence;
mod error;
mod filter;
mod tone;
mod waveform;

pub use coherence::{coherence_time, CoherenceOutcome, CoherenceResult};
pub use error::SignalError;
pub use filter::{bandpass, design_bandpass_taps, BandpassSpec};
pub use tone::{envelope, estimate_tone, wrap_phase, ToneEstimate};
pub use waveform::{synth_tone, Waveform};
