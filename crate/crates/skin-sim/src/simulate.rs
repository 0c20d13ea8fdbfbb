use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::activity::CANONICAL_ENV_WINDOW;
use crate::channel::{ChannelProcess, GainGeometry};
use crate::error::SimError;
use crate::imu::{gauss, ImuStream, MixingBank, IMU_AXES};
use crate::motor::{motor_envelope, MotorSchedule};
use crate::scenario::SimScenario;
use crate::seed::derive_seed;
use crate::truth::{TruthRecord, TruthSeries};
use signal_core::{bandpass, coherence_time, envelope, BandpassSpec, CoherenceOutcome, Waveform};

/// Motor spin-up time to a stable vibration level.
pub const MOTOR_RAMP: f64 = 0.030;
/// Motor decay time after mute.
pub const MOTOR_RING: f64 = 0.010;
/// Envelope window (samples) of the canonical coherence measurement.
pub const COHERENCE_ENV_WINDOW: usize = CANONICAL_ENV_WINDOW;

/// Everything a bench run records.
#[derive(Debug, Clone)]
pub struct SimOutput {
    /// Per-receiver waveforms.
    pub rx: Vec<Waveform>,
    /// Co-located 6-axis IMU at the receiver sample rate.
    pub imu: ImuStream,
    /// Window-averaged true channel matrices for pilots and the data carrier.
    pub truth: TruthSeries,
    /// Noise-only captures per receiver (motors muted), for SNR measurement.
    pub noise: Vec<Waveform>,
}

struct CarrierSet {
    /// (carrier_hz, tx0, per-carrier scale)
    tones: Vec<(f64, usize, f64)>,
}

impl CarrierSet {
    fn of_scenario(sc: &SimScenario, geometry: &GainGeometry) -> Self {
        let tones = sc
            .pilots
            .iter()
            .map(|p| {
                let kappa = 1.0 + 0.004 * (p.carrier_hz - geometry.ref_freq);
                (p.carrier_hz, p.tx - 1, kappa)
            })
            .collect();
        Self { tones }
    }
}

fn noise_sigma(sc: &SimScenario, geometry: &GainGeometry) -> f64 {
    match sc.snr_db {
        None => 0.0,
        Some(db) => {
            let snr = 10f64.powf(db / 10.0);
            let mut p = 0.0;
            let mut count = 0.0;
            for pa in &sc.pilots {
                for rx in 0..sc.n_rx() {
                    let mean = geometry.mean_at(rx, pa.tx - 1, pa.carrier_hz);
                    p += mean.norm_sqr() / 2.0;
                    count += 1.0;
                }
            }
            (p / count / snr).sqrt()
        }
    }
}

/// Runs the generative model for one scenario.
pub fn simulate(sc: &SimScenario) -> Result<SimOutput, SimError> {
    simulate_inner(sc, None)
}

/// Calibration hook: run with an explicit latent correlation time instead of
/// the activity's calibrated one.
#[doc(hidden)]
pub fn simulate_with_tau(sc: &SimScenario, tau: f64) -> Result<SimOutput, SimError> {
    simulate_inner(sc, Some(tau))
}

fn simulate_inner(sc: &SimScenario, tau_override: Option<f64>) -> Result<SimOutput, SimError> {
    sc.validate()?;
    let fs = sc.sample_rate;
    let n = (sc.duration * fs).round() as usize;
    let geometry = GainGeometry::standard(sc.amplitude_scale, sc.activity.fade_depth);

    // Latent updates at an integer multiple of the sample rate, fast enough
    // for the coherence target.
    let mult = ((20.0 / sc.activity.target_coherence) / fs).ceil().max(1.0) as usize;
    let rate = fs * mult as f64;
    let process = ChannelProcess::generate_with_tau(
        geometry.clone(),
        &sc.activity,
        sc.duration,
        rate,
        sc.seed,
        tau_override,
    )?;

    let schedule = if sc.muted {
        MotorSchedule::always_off()
    } else {
        MotorSchedule::always_on()
    };
    let envelopes: Vec<Waveform> = (0..sc.n_tx())
        .map(|_| motor_envelope(&schedule, MOTOR_RAMP, MOTOR_RING, sc.duration, fs))
        .collect();

    let carriers = CarrierSet::of_scenario(sc, &geometry);
    let sigma = noise_sigma(sc, &geometry);
    let two_pi = 2.0 * std::f64::consts::PI;

    // Receivers.
    let mut rx_out = Vec::with_capacity(sc.n_rx());
    for m in 0..sc.n_rx() {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(sc.seed, &[0xA001, m as u64]));
        let mut samples = Vec::with_capacity(n);
        for k in 0..n {
            let t = k as f64 / fs;
            let li = k * mult;
            let mut acc = 0.0;
            for &(freq, tx, kappa) in &carriers.tones {
                let env = envelopes[tx].samples()[k];
                if env == 0.0 {
                    continue;
                }
                let h = process.gain(m, tx, freq, li);
                acc += env * kappa * h.norm() * (two_pi * freq * t + h.arg()).sin();
            }
            if sigma > 0.0 {
                acc += sigma * gauss(&mut rng);
            }
            samples.push(acc);
        }
        rx_out.push(Waveform::new(samples, fs)?);
    }

    // IMU: per motor, tone amplitude and phase offsets are saturated linear
    // mixes of that motor's latent state in the radial/tangential basis of
    // its two subchannels.
    let bank = MixingBank::generate(sc.coupling.mixing_seed, sc.n_tx());
    let rot: Vec<(f64, f64)> = (0..sc.n_rx() * sc.n_tx())
        .map(|idx| {
            let (m, t) = (idx / sc.n_tx(), idx % sc.n_tx());
            let theta = geometry.mean_at(m, t, geometry.ref_freq).arg();
            (theta.cos(), theta.sin())
        })
        .collect();
    let mut axis_rngs: Vec<ChaCha8Rng> = (0..IMU_AXES)
        .map(|a| ChaCha8Rng::seed_from_u64(derive_seed(sc.seed, &[0xB002, a as u64])))
        .collect();
    let mut imu_data = vec![0.0f64; n * IMU_AXES];
    for k in 0..n {
        let t = k as f64 / fs;
        let li = k * mult;
        for tx in 0..sc.n_tx() {
            let env = envelopes[tx].samples()[k];
            if env == 0.0 {
                continue;
            }
            let (u1, v1) = process.latent(0, tx);
            let (u2, v2) = process.latent(1, tx);
            let (c1, s1) = rot[tx];
            let (c2, s2) = rot[sc.n_tx() + tx];
            let xi = [
                c1 * u1[li] + s1 * v1[li],
                -s1 * u1[li] + c1 * v1[li],
                c2 * u2[li] + s2 * v2[li],
                -s2 * u2[li] + c2 * v2[li],
            ];
            for axis in 0..IMU_AXES {
                let (depth, span) = if axis < 3 {
                    (sc.coupling.gyro_depth, sc.coupling.gyro_phase_span)
                } else {
                    (sc.coupling.acc_depth, sc.coupling.acc_phase_span)
                };
                let a_row = &bank.amp_rows[axis][tx];
                let p_row = &bank.phase_rows[axis][tx];
                let mix_a: f64 = (0..4).map(|i| a_row[i] * xi[i]).sum();
                let mix_p: f64 = (0..4).map(|i| p_row[i] * xi[i]).sum();
                let amp = 1.0 + depth * (sc.coupling.saturation * mix_a).tanh();
                let ph = bank.phase_offsets[axis][tx]
                    + span * (sc.coupling.saturation * mix_p).tanh();
                for &(freq, c_tx, kappa) in &carriers.tones {
                    if c_tx != tx {
                        continue;
                    }
                    imu_data[k * IMU_AXES + axis] +=
                        env * kappa * amp * (two_pi * freq * t + ph).sin();
                }
            }
        }
        for axis in 0..IMU_AXES {
            let s = if axis < 3 {
                sc.coupling.gyro_noise
            } else {
                sc.coupling.acc_noise
            };
            if s > 0.0 {
                imu_data[k * IMU_AXES + axis] += s * gauss(&mut axis_rngs[axis]);
            }
        }
    }
    let imu = ImuStream::from_axes(imu_data, fs);

    // Truth: window means of the exact gains, for pilots plus data carrier.
    let mut truth_carriers = sc.pilot_carriers_sorted();
    if !truth_carriers.contains(&sc.data_carrier) {
        truth_carriers.push(sc.data_carrier);
        truth_carriers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    let n_windows = if n >= sc.window {
        (n - sc.window) / sc.hop + 1
    } else {
        0
    };
    let mut records = Vec::with_capacity(n_windows * truth_carriers.len() * 4);
    for w in 0..n_windows {
        let start = w * sc.hop;
        for &carrier in &truth_carriers {
            for rx in 0..sc.n_rx() {
                for tx in 0..sc.n_tx() {
                    let mut mean = Complex64::new(0.0, 0.0);
                    for k in start..start + sc.window {
                        mean += process.gain(rx, tx, carrier, k * mult);
                    }
                    mean /= sc.window as f64;
                    records.push(TruthRecord {
                        window_index: w,
                        carrier_hz: carrier,
                        rx: rx + 1,
                        tx: tx + 1,
                        gain: mean,
                    });
                }
            }
        }
    }
    let truth = TruthSeries::new(records, truth_carriers, n_windows, sc.n_rx(), sc.n_tx());

    // Noise-floor captures.
    let cap_len = (sc.duration.min(10.0) * fs).round() as usize;
    let noise = (0..sc.n_rx())
        .map(|m| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(sc.seed, &[0xC003, m as u64]));
            let samples = (0..cap_len).map(|_| sigma * gauss(&mut rng)).collect();
            Waveform::new(samples, fs)
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(SimOutput {
        rx: rx_out,
        imu,
        truth,
        noise,
    })
}

/// Canonical coherence measurement: noise-free run, highest pilot carrier,
/// second receiver, narrow bandpass, short sliding amplitude window, then
/// the autocorrelation threshold crossing.
pub fn measure_gain_coherence(
    sc: &SimScenario,
    threshold: f64,
) -> Result<CoherenceOutcome, SimError> {
    measure_coherence_inner(sc, threshold, None)
}

/// Calibration hook: canonical measurement with an explicit latent
/// correlation time.
#[doc(hidden)]
pub fn measure_gain_coherence_with_tau(
    sc: &SimScenario,
    threshold: f64,
    tau: f64,
) -> Result<CoherenceOutcome, SimError> {
    measure_coherence_inner(sc, threshold, Some(tau))
}

fn measure_coherence_inner(
    sc: &SimScenario,
    threshold: f64,
    tau_override: Option<f64>,
) -> Result<CoherenceOutcome, SimError> {
    if sc.activity.fade_depth == 0.0 {
        // Frozen channel: the gain envelope is constant by construction.
        return Ok(CoherenceOutcome::Infinite {
            correlation_threshold: threshold,
        });
    }
    let mut quiet = sc.clone();
    quiet.snr_db = None;
    let carrier = *quiet
        .pilot_carriers_sorted()
        .last()
        .ok_or_else(|| SimError::BadScenario("empty pilot plan".into()))?;
    if carrier < 2.0 * quiet.sample_rate / COHERENCE_ENV_WINDOW as f64 {
        return Err(SimError::BadScenario(format!(
            "coherence carrier {carrier} Hz too low for a {COHERENCE_ENV_WINDOW}-sample window"
        )));
    }
    let out = simulate_inner(&quiet, tau_override)?;
    let rx = &out.rx[quiet.n_rx() - 1];
    let spec = BandpassSpec::around_carrier(carrier);
    let filtered = bandpass(rx, &spec)?;
    let taps = signal_core::design_bandpass_taps(&spec, quiet.sample_rate)?;
    let gd = (taps.len() - 1) / 2;
    let trim_start = gd + (0.08 * quiet.sample_rate).ceil() as usize;
    let trim_end = gd;
    if filtered.len() <= trim_start + trim_end + COHERENCE_ENV_WINDOW {
        return Err(SimError::BadScenario("record too short for coherence".into()));
    }
    let core =
        Waveform::new(
            filtered.samples()[trim_start..filtered.len() - trim_end].to_vec(),
            quiet.sample_rate,
        )?;
    let env = envelope(&core, carrier, 1, COHERENCE_ENV_WINDOW)?;
    Ok(coherence_time(&env, threshold)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::subject_preset;
    use signal_core::estimate_tone;

    fn short_default(duration: f64) -> SimScenario {
        let mut sc = SimScenario::default_scenario();
        sc.duration = duration;
        sc
    }

    #[test]
    fn deterministic_outputs() {
        let sc = short_default(3.0);
        let a = simulate(&sc).unwrap();
        let b = simulate(&sc).unwrap();
        assert_eq!(a.rx[0], b.rx[0]);
        assert_eq!(a.imu, b.imu);
        assert_eq!(a.truth, b.truth);
        assert_eq!(a.noise[1], b.noise[1]);
    }

    #[test]
    fn noise_free_single_carrier_closed_loop() {
        // Frozen channel, one carrier, no noise: estimating the tone and
        // rebuilding the response reproduces the configured gain.
        let mut sc = short_default(3.0);
        sc.snr_db = None;
        sc.activity.fade_depth = 0.0;
        sc.pilots.retain(|p| p.carrier_hz == 110.0);
        sc.validate().unwrap();
        let out = simulate(&sc).unwrap();
        // Window 20 (2 s in) is far past the motor ramp.
        let w = 20;
        let start = w * sc.hop;
        for rx in 0..2 {
            let est = estimate_tone(&out.rx[rx], 110.0, start, sc.window).unwrap();
            let truth = out.truth.gain(w, 110.0, rx + 1, 1).unwrap();
            // The synthesized tone carries the carrier-scale factor; undo it.
            let kappa = 1.0 + 0.004 * (110.0 - 115.0);
            let h = mimo_math::channel_response(est.amplitude / kappa, est.phase, 1.0, 0.0)
                .unwrap();
            assert!(
                (h - truth).norm() < 1e-3,
                "rx{rx}: est {h} vs truth {truth}"
            );
        }
    }

    #[test]
    fn muted_run_is_pure_noise_at_configured_power() {
        let mut sc = short_default(10.0);
        sc.muted = true;
        let out = simulate(&sc).unwrap();
        let geometry = GainGeometry::standard(sc.amplitude_scale, sc.activity.fade_depth);
        let expected = noise_sigma(&sc, &geometry).powi(2);
        for rx in &out.rx {
            let p = rx.samples().iter().map(|s| s * s).sum::<f64>() / rx.len() as f64;
            assert!((p - expected).abs() / expected < 0.10, "p = {p}, expected = {expected}");
        }
    }

    #[test]
    fn truth_windows_have_full_rank_and_low_condition() {
        let sc = short_default(60.0);
        let out = simulate(&sc).unwrap();
        let mut ok = 0;
        let n = out.truth.n_windows();
        for w in 0..n {
            let h = out.truth.channel_matrix(w, sc.data_carrier).unwrap();
            let rank = h.rank(1e-6).unwrap();
            let cond = h.condition_number_db().unwrap().db();
            if rank == 2 && cond.map(|c| c < 15.0).unwrap_or(false) {
                ok += 1;
            }
        }
        assert!(
            ok as f64 >= 0.9 * n as f64,
            "only {ok}/{n} windows well-conditioned"
        );
    }

    #[test]
    fn subject_presets_hit_amplitude_ranges() {
        for (id, lo, hi) in [(1u32, 0.10, 0.13), (2u32, 0.03, 0.04)] {
            let mut sc = subject_preset(id).unwrap();
            sc.duration = 60.0;
            let out = simulate(&sc).unwrap();
            let mut ranges = Vec::new();
            for p in &sc.pilots {
                for rx in 1..=2 {
                    let mut min = f64::INFINITY;
                    let mut max = f64::NEG_INFINITY;
                    for w in 0..out.truth.n_windows() {
                        let a = out.truth.gain(w, p.carrier_hz, rx, p.tx).unwrap().norm();
                        min = min.min(a);
                        max = max.max(a);
                    }
                    ranges.push(max - min);
                }
            }
            let mean = ranges.iter().sum::<f64>() / ranges.len() as f64;
            assert!(
                mean > lo && mean < hi,
                "subject {id}: mean range {mean} outside [{lo}, {hi}] ({ranges:?})"
            );
        }
    }

    #[test]
    fn preset_coherence_round_trip() {
        // Desk-scale version of the calibration contract: 10 seeds per
        // preset here; the acceptance suite runs the full 20.
        for (profile, target) in [
            (ActivityProfileKind::Resting, 0.150),
            (ActivityProfileKind::Browsing, 0.044),
            (ActivityProfileKind::Typing, 0.040),
        ] {
            let mut total = 0.0;
            let seeds = 10;
            for s in 0..seeds {
                let mut sc = SimScenario::default_scenario();
                sc.duration = 60.0;
                sc.seed = 900 + s;
                sc.activity = profile.profile();
                let out = measure_gain_coherence(&sc, 0.8).unwrap();
                total += out.coherence_time().expect("finite coherence");
            }
            let mean = total / seeds as f64;
            assert!(
                (mean - target).abs() / target < 0.10,
                "{:?}: mean {mean} vs target {target}",
                profile
            );
        }
    }

    #[derive(Debug, Clone, Copy)]
    enum ActivityProfileKind {
        Resting,
        Browsing,
        Typing,
    }

    impl ActivityProfileKind {
        fn profile(self) -> crate::ActivityProfile {
            match self {
                ActivityProfileKind::Resting => crate::ActivityProfile::resting(),
                ActivityProfileKind::Browsing => crate::ActivityProfile::browsing(),
                ActivityProfileKind::Typing => crate::ActivityProfile::typing(),
            }
        }
    }

    #[test]
    fn zero_fade_reports_infinite_coherence() {
        let mut sc = short_default(20.0);
        sc.activity.fade_depth = 0.0;
        let out = measure_gain_coherence(&sc, 0.8).unwrap();
        assert!(matches!(out, CoherenceOutcome::Infinite { .. }));
    }
}
