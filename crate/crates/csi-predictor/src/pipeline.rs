use crate::error::PredictorError;
use crate::metrics::TargetKind;
use crate::quantizer::LevelDictionary;
use crate::window::window_imu;
use signal_core::{bandpass, design_bandpass_taps, BandpassSpec};
use skin_sim::{ImuStream, SensorSet, SimScenario, TruthSeries};

/// Identity of one predictor slot: which pilot, which receiver, which
/// quantity, fed by which sensor axes.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotSpec {
    pub carrier_hz: f64,
    /// 1-based receiver index.
    pub rx: usize,
    pub target: TargetKind,
    pub sensor: SensorSet,
}

impl SlotSpec {
    pub fn file_stem(&self) -> String {
        format!(
            "lstm_c{}_rx{}_{}_{}",
            self.carrier_hz,
            self.rx,
            self.target.label(),
            self.sensor.label().replace('+', "_")
        )
    }
}

/// The full slot grid for a scenario and sensor set: every pilot carrier,
/// every receiver, amplitude and phase.
pub fn default_slots(sc: &SimScenario, sensor: SensorSet) -> Vec<SlotSpec> {
    let mut slots = Vec::new();
    for carrier in sc.pilot_carriers_sorted() {
        for rx in 1..=sc.n_rx() {
            for target in [TargetKind::Amplitude, TargetKind::Phase] {
                slots.push(SlotSpec {
                    carrier_hz: carrier,
                    rx,
                    target,
                    sensor,
                });
            }
        }
    }
    slots
}

/// Windowed features and raw target values of one slot, aligned on the
/// truth window grid. Blocks are raw (un-standardized); quantizers and
/// standardizers are fitted per training split later.
#[derive(Debug, Clone)]
pub struct SlotDataset {
    pub spec: SlotSpec,
    /// Timestep-major `window x n_axes` blocks.
    pub blocks: Vec<Vec<f64>>,
    /// Exact target value (amplitude or phase of the true gain) per block.
    pub raw_values: Vec<f64>,
    /// Truth window index per block.
    pub window_indices: Vec<usize>,
    pub window: usize,
    pub n_axes: usize,
    pub amp_levels: usize,
    pub phase_levels: usize,
}

impl SlotDataset {
    /// Level dictionary fitted on the training rows: uniform bins over the
    /// observed amplitude range, or the fixed phase circle.
    pub fn fit_dictionary(&self, train_indices: &[usize]) -> Result<LevelDictionary, PredictorError> {
        match self.spec.target {
            TargetKind::Amplitude => {
                let train: Vec<f64> = train_indices.iter().map(|&i| self.raw_values[i]).collect();
                LevelDictionary::fit_amplitude(&train, self.amp_levels)
            }
            TargetKind::Phase => Ok(LevelDictionary::phase(self.phase_levels)),
        }
    }
}

/// Builds one slot dataset from a recorded run: bandpass the selected IMU
/// axes around the slot's pilot carrier, window them on the truth grid, and
/// attach the exact per-window target values. Windows inside the filter
/// transients or the motor ramp are dropped.
pub fn build_slot_dataset(
    imu: &ImuStream,
    truth: &TruthSeries,
    sc: &SimScenario,
    spec: &SlotSpec,
    amp_levels: usize,
    phase_levels: usize,
) -> Result<SlotDataset, PredictorError> {
    let tx = sc
        .tx_of_carrier(spec.carrier_hz)
        .ok_or_else(|| PredictorError::ShapeMismatch(format!(
            "carrier {} Hz is not in the pilot plan",
            spec.carrier_hz
        )))?;
    let band = BandpassSpec::around_carrier(spec.carrier_hz);
    let taps = design_bandpass_taps(&band, sc.sample_rate)?;
    let gd = (taps.len() - 1) / 2;

    // Filter the selected axes, then window the filtered stream.
    let axes = spec.sensor.axis_indices();
    let mut filtered = vec![0.0; imu.n_samples() * 6];
    for &a in axes {
        let f = bandpass(&imu.axis_waveform(a), &band)?;
        for (i, v) in f.samples().iter().enumerate() {
            filtered[i * 6 + a] = *v;
        }
    }
    let filtered_stream = ImuStream::from_axes(filtered, sc.sample_rate);
    let fb = window_imu(&filtered_stream, spec.sensor, sc.window, sc.hop)?;

    // Drop edge windows: leading filter transient plus motor ramp, trailing
    // filter transient.
    let ramp = (skin_sim::MOTOR_RAMP * sc.sample_rate).ceil() as usize;
    let skip_start = (gd + ramp + sc.hop - 1) / sc.hop + 1;
    let skip_end = gd / sc.hop + 1;
    let n_windows = fb.blocks.len().min(truth.n_windows());
    if skip_start + skip_end >= n_windows {
        return Err(PredictorError::StreamTooShort {
            len: imu.n_samples(),
            window: sc.window,
        });
    }

    let mut blocks = Vec::new();
    let mut raw_values = Vec::new();
    let mut window_indices = Vec::new();
    for w in skip_start..n_windows - skip_end {
        let gain = truth
            .gain(w, spec.carrier_hz, spec.rx, tx + 1)
            .ok_or_else(|| PredictorError::ShapeMismatch(format!(
                "truth lacks window {w} carrier {} rx {}",
                spec.carrier_hz, spec.rx
            )))?;
        blocks.push(fb.blocks[w].clone());
        raw_values.push(match spec.target {
            TargetKind::Amplitude => gain.norm(),
            TargetKind::Phase => gain.arg(),
        });
        window_indices.push(w);
    }
    Ok(SlotDataset {
        spec: spec.clone(),
        blocks,
        raw_values,
        window_indices,
        window: sc.window,
        n_axes: axes.len(),
        amp_levels,
        phase_levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use skin_sim::simulate;

    #[test]
    fn slot_grid_covers_carriers_receivers_targets() {
        let sc = SimScenario::default_scenario();
        let slots = default_slots(&sc, SensorSet::Gyro);
        assert_eq!(slots.len(), 6 * 2 * 2);
        assert!(slots.iter().any(|s| s.carrier_hz == 140.0
            && s.rx == 2
            && s.target == TargetKind::Phase));
    }

    #[test]
    fn dataset_aligns_blocks_with_truth_windows() {
        let mut sc = SimScenario::default_scenario();
        sc.duration = 20.0;
        let out = simulate(&sc).unwrap();
        let spec = SlotSpec {
            carrier_hz: 110.0,
            rx: 1,
            target: TargetKind::Amplitude,
            sensor: SensorSet::Gyro,
        };
        let ds = build_slot_dataset(&out.imu, &out.truth, &sc, &spec, 16, 32).unwrap();
        assert_eq!(ds.n_axes, 3);
        assert_eq!(ds.blocks.len(), ds.raw_values.len());
        assert!(ds.blocks.len() > 100, "only {} blocks", ds.blocks.len());
        // Raw values match the truth series at the recorded indices.
        for (k, &w) in ds.window_indices.iter().enumerate().take(5) {
            let g = out.truth.gain(w, 110.0, 1, 1).unwrap();
            assert_eq!(ds.raw_values[k], g.norm());
        }
    }

    #[test]
    fn unknown_carrier_rejected() {
        let mut sc = SimScenario::default_scenario();
        sc.duration = 15.0;
        let out = simulate(&sc).unwrap();
        let spec = SlotSpec {
            carrier_hz: 123.0,
            rx: 1,
            target: TargetKind::Amplitude,
            sensor: SensorSet::Gyro,
        };
        assert!(build_slot_dataset(&out.imu, &out.truth, &sc, &spec, 16, 32).is_err());
    }
}
