use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::activity::ActivityProfile;
use crate::error::SimError;
use crate::imu::SensorCoupling;

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

/// One pilot carrier and the transmitter (1-based) that owns it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PilotAssignment {
    pub carrier_hz: f64,
    pub tx: usize,
}

/// Full description of a simulated bench run. Serialized as TOML with a
/// versioned schema; identical scenario + seed means identical output bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimScenario {
    pub schema_version: u32,
    pub name: String,
    pub seed: u64,
    pub sample_rate: f64,
    pub duration: f64,
    /// Receiver SNR in dB (per-carrier mean tone power over noise power);
    /// omit for noise-free runs.
    pub snr_db: Option<f64>,
    /// Keep both motors off (noise-floor capture).
    #[serde(default)]
    pub muted: bool,
    pub pilots: Vec<PilotAssignment>,
    pub data_carrier: f64,
    /// Measurement window and hop, in samples.
    pub window: usize,
    pub hop: usize,
    pub activity: ActivityProfile,
    /// Per-subchannel mean gain magnitude (received volts per transmitted
    /// volt).
    pub amplitude_scale: f64,
    pub coupling: SensorCoupling,
}

pub(crate) const N_RX: usize = 2;
pub(crate) const N_TX: usize = 2;

impl SimScenario {
    /// The default bench: 300 Hz sampling, six pilots split between the two
    /// motors, resting activity, 14 dB receiver SNR.
    pub fn default_scenario() -> Self {
        Self {
            schema_version: SCENARIO_SCHEMA_VERSION,
            name: "default".into(),
            seed: 42,
            sample_rate: 300.0,
            duration: 150.0,
            snr_db: Some(14.0),
            muted: false,
            pilots: vec![
                PilotAssignment { carrier_hz: 90.0, tx: 1 },
                PilotAssignment { carrier_hz: 110.0, tx: 1 },
                PilotAssignment { carrier_hz: 130.0, tx: 1 },
                PilotAssignment { carrier_hz: 100.0, tx: 2 },
                PilotAssignment { carrier_hz: 120.0, tx: 2 },
                PilotAssignment { carrier_hz: 140.0, tx: 2 },
            ],
            data_carrier: 125.0,
            window: 30,
            hop: 30,
            activity: ActivityProfile::resting(),
            amplitude_scale: 0.15,
            coupling: SensorCoupling::default(),
        }
    }

    pub fn n_rx(&self) -> usize {
        N_RX
    }

    pub fn n_tx(&self) -> usize {
        N_TX
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.schema_version != SCENARIO_SCHEMA_VERSION {
            return Err(SimError::BadScenario(format!(
                "unsupported schema_version {} (expected {})",
                self.schema_version, SCENARIO_SCHEMA_VERSION
            )));
        }
        if !(self.sample_rate > 0.0) || !(self.duration > 0.0) {
            return Err(SimError::BadScenario(
                "sample_rate and duration must be positive".into(),
            ));
        }
        if self.window == 0 || self.hop == 0 {
            return Err(SimError::BadScenario("window and hop must be positive".into()));
        }
        if self.pilots.is_empty() {
            return Err(SimError::BadScenario("pilot plan is empty".into()));
        }
        let nyquist = self.sample_rate / 2.0;
        let mut seen: Vec<f64> = Vec::new();
        for p in &self.pilots {
            if !(p.carrier_hz > 0.0) || p.carrier_hz >= nyquist {
                return Err(SimError::BadScenario(format!(
                    "pilot {} Hz outside (0, Nyquist)",
                    p.carrier_hz
                )));
            }
            if !(1..=N_TX).contains(&p.tx) {
                return Err(SimError::BadScenario(format!(
                    "pilot {} Hz assigned to unknown tx {}",
                    p.carrier_hz, p.tx
                )));
            }
            if seen.iter().any(|&c| c == p.carrier_hz) {
                return Err(SimError::CarrierCollision(p.carrier_hz));
            }
            seen.push(p.carrier_hz);
        }
        if !(self.data_carrier > 0.0) || self.data_carrier >= nyquist {
            return Err(SimError::BadScenario("data carrier outside (0, Nyquist)".into()));
        }
        if !(self.amplitude_scale > 0.0) {
            return Err(SimError::BadScenario("amplitude_scale must be positive".into()));
        }
        self.activity.validate()?;
        Ok(())
    }

    /// Carriers owned by a transmitter (0-based index), ascending.
    pub fn carriers_of_tx(&self, tx0: usize) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .pilots
            .iter()
            .filter(|p| p.tx == tx0 + 1)
            .map(|p| p.carrier_hz)
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    pub fn pilot_carriers_sorted(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.pilots.iter().map(|p| p.carrier_hz).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    /// Transmitter (0-based) owning a pilot carrier.
    pub fn tx_of_carrier(&self, carrier: f64) -> Option<usize> {
        self.pilots
            .iter()
            .find(|p| p.carrier_hz == carrier)
            .map(|p| p.tx - 1)
    }

    pub fn to_toml_string(&self) -> Result<String, SimError> {
        toml::to_string_pretty(self).map_err(|e| SimError::MalformedScenario(e.to_string()))
    }

    pub fn from_toml_str(s: &str) -> Result<Self, SimError> {
        let sc: SimScenario =
            toml::from_str(s).map_err(|e| SimError::MalformedScenario(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<(), SimError> {
        std::fs::write(path, self.to_toml_string()?)?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }
}

/// Bench presets matching the two recorded subjects: identical pilot plans
/// and sensor statistics, different received-amplitude scale (dynamic range
/// about 0.114 V for subject 1 and 0.035 V for subject 2).
pub fn subject_preset(id: u32) -> Result<SimScenario, SimError> {
    let mut sc = SimScenario::default_scenario();
    match id {
        1 => {
            sc.name = "subject1".into();
            sc.seed = 1001;
        }
        2 => {
            sc.name = "subject2".into();
            sc.seed = 1002;
            sc.amplitude_scale *= 0.035 / 0.114;
        }
        other => return Err(SimError::UnknownSubject(other)),
    }
    Ok(sc)
}
