//! Complex linear algebra for small MIMO links.
//!
//! Provides the channel-matrix container and the operations needed to go from
//! per-subchannel amplitude/phase measurements to a spectral-efficiency
//! number: channel-response construction, singular value decomposition,
//! SVD-derived precoding/decoding, per-stream SINR and effective capacity,
//! channel-quality diagnostics (rank, Gram eigenvalues, condition number),
//! and sounding-overhead accounting for half-duplex vibration links.
//!
//! Matrices here are tiny (2x2 in the standard link, generalizable to a few
//! antennas), so everything is implemented directly on dense row-major
//! storage with `f64` precision. All operations are pure functions of their
//! inputs; values are immutable after construction.

mod capacity;
mod error;
mod matrix;
mod sounding;
mod svd;

pub use capacity::{
    effective_capacity, effective_channel, precoding_pair, siso_capacity, stream_sinrs,
    EffectiveChannel, PrecodingPair,
};
pub use error::MimoError;
pub use matrix::{channel_response, ChannelMatrix, ConditionNumber};
pub use num_complex::Complex64;
pub use sounding::{OverheadModel, SoundingBudget};
pub use svd::{svd, SvdDecomposition};
