//! Channel-state prediction from transmitter-side inertial data.
//!
//! The pipeline quantizes per-window channel amplitude/phase into discrete
//! levels, slices per-carrier bandpassed IMU signals into windows, and trains
//! one LSTM classifier per (pilot carrier, receiver, amplitude|phase) slot.
//! The LSTM, its backpropagation-through-time gradients, and the Adam loop
//! are implemented here directly; gradients are verified against finite
//! differences in the test suite. Pilot estimates extend to arbitrary data
//! carriers by cubic-spline interpolation.

mod checkpoint;
mod error;
mod lstm;
mod metrics;
mod pipeline;
mod quantizer;
mod spline;
mod train;
mod window;

pub use checkpoint::{load_model, save_model, SlotCheckpoint};
pub use error::PredictorError;
pub use lstm::{batch_gradients, batch_loss, DropoutMask, LstmGradients, LstmModel};
pub use metrics::{evaluate_levels, PredictionReport, TargetKind};
pub use pipeline::{build_slot_dataset, default_slots, SlotDataset, SlotSpec};
pub use quantizer::{LevelDictionary, QuantizationScheme};
pub use spline::{interpolate_csi, interpolate_matrix, CubicSpline, PilotCsi};
pub use train::{
    cross_validate, train_classifier, train_holdout, train_slots_holdout, CvReport,
    SlotPredictions, TrainConfig, TrainedSlot,
};
pub use window::{window_imu, FeatureBlocks, Standardizer};
