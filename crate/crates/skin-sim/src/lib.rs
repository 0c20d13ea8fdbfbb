//! Generative model of the 2x2 skin-vibration testbed.
//!
//! A scenario drives four independent time-varying subchannels (complex
//! Gauss-Markov gains around fixed means), motor ramp/ring dynamics, and the
//! synthesis of what the bench records: per-receiver waveforms, a co-located
//! 6-axis IMU stream whose axes are smooth functions of the latent channel
//! state, and the exact per-window channel truth. Everything is deterministic
//! given the scenario seed.

mod activity;
mod channel;
mod error;
mod imu;
mod motor;
mod scenario;
mod seed;
mod simulate;
mod truth;

pub use activity::ActivityProfile;
pub use channel::{evolve_channel, ChannelProcess, GainGeometry};
pub use error::SimError;
pub use imu::{ImuFrame, ImuStream, SensorCoupling, SensorSet};
pub use motor::{motor_envelope, MotorSchedule, MotorState};
pub use scenario::{subject_preset, PilotAssignment, SimScenario};
pub use simulate::{
    measure_gain_coherence, measure_gain_coherence_with_tau, simulate, simulate_with_tau,
    SimOutput, COHERENCE_ENV_WINDOW, MOTOR_RAMP, MOTOR_RING,
};
pub use truth::{TruthRecord, TruthSeries};
