use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::activity::ActivityProfile;
use crate::error::SimError;
use crate::seed::derive_seed;

/// Fixed geometry of the subchannel gains: per-subchannel complex means at a
/// reference frequency plus smooth per-carrier magnitude/phase modifiers, and
/// the absolute per-component deviation scale of the fading.
#[derive(Debug, Clone)]
pub struct GainGeometry {
    pub n_rx: usize,
    pub n_tx: usize,
    /// Row-major per-subchannel means at `ref_freq`.
    pub mean: Vec<Complex64>,
    /// Per-subchannel phase rotation in rad per Hz of carrier offset.
    pub phase_slope: Vec<f64>,
    /// Relative magnitude change per Hz of carrier offset.
    pub mag_slope: f64,
    pub ref_freq: f64,
    /// Std of each of Re/Im of the gain deviation (volts/volt).
    pub deviation_sigma: f64,
}

impl GainGeometry {
    /// The bench geometry: a scaled unitary-like 2x2 mean matrix with spread
    /// entry phases (so coarse phase quantization visibly hurts capacity)
    /// and gentle per-carrier drift for interpolation across the band.
    pub fn standard(amplitude_scale: f64, fade_depth: f64) -> Self {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let a = [0.4, -1.9];
        let b = [2.3, 0.7];
        let r = [[inv, -inv], [inv, inv]];
        let scale = amplitude_scale * std::f64::consts::SQRT_2;
        let mut mean = Vec::with_capacity(4);
        for m in 0..2 {
            for n in 0..2 {
                mean.push(Complex64::from_polar(scale * r[m][n].abs(), a[m] + b[n])
                    * if r[m][n] < 0.0 { -1.0 } else { 1.0 });
            }
        }
        Self {
            n_rx: 2,
            n_tx: 2,
            mean,
            phase_slope: vec![0.015, -0.012, 0.010, -0.014],
            mag_slope: -0.002,
            ref_freq: 115.0,
            deviation_sigma: fade_depth * amplitude_scale,
        }
    }

    pub fn mean_at(&self, rx: usize, tx: usize, freq: f64) -> Complex64 {
        let idx = rx * self.n_tx + tx;
        let df = freq - self.ref_freq;
        let mag = 1.0 + self.mag_slope * df;
        self.mean[idx] * Complex64::from_polar(mag, self.phase_slope[idx] * df)
    }
}

/// Time-varying subchannel gains: each subchannel carries an independent
/// pair of unit-variance first-order Gauss-Markov latents (one for Re, one
/// for Im of the deviation around the mean). Per-carrier gains share the
/// subchannel latent, so nearby carriers fade together.
#[derive(Debug, Clone)]
pub struct ChannelProcess {
    geometry: GainGeometry,
    rate: f64,
    len: usize,
    /// `(rx * n_tx + tx) * 2 + component` -> latent series.
    latents: Vec<Vec<f64>>,
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

impl ChannelProcess {
    pub fn generate(
        geometry: GainGeometry,
        profile: &ActivityProfile,
        duration: f64,
        rate: f64,
        seed: u64,
    ) -> Result<Self, SimError> {
        Self::generate_with_tau(geometry, profile, duration, rate, seed, None)
    }

    /// Calibration hook: generate with an explicit latent correlation time.
    #[doc(hidden)]
    pub fn generate_with_tau(
        geometry: GainGeometry,
        profile: &ActivityProfile,
        duration: f64,
        rate: f64,
        seed: u64,
        tau_override: Option<f64>,
    ) -> Result<Self, SimError> {
        profile.validate()?;
        let min_rate = 20.0 / profile.target_coherence;
        if rate < min_rate {
            return Err(SimError::RateTooLow {
                rate,
                coherence: profile.target_coherence,
                min: min_rate,
            });
        }
        let len = (duration * rate).ceil() as usize + 1;
        let tau = tau_override.unwrap_or_else(|| profile.latent_tau());
        let phi = (-1.0 / (rate * tau)).exp();
        let innovation = (1.0 - phi * phi).sqrt();
        let mut latents = Vec::with_capacity(geometry.n_rx * geometry.n_tx * 2);
        for rx in 0..geometry.n_rx {
            for tx in 0..geometry.n_tx {
                for comp in 0..2 {
                    let sub = derive_seed(
                        seed,
                        &[0xC0A1, rx as u64, tx as u64, comp as u64],
                    );
                    let mut rng = ChaCha8Rng::seed_from_u64(sub);
                    let mut series = Vec::with_capacity(len);
                    if profile.fade_depth == 0.0 {
                        series.resize(len, 0.0);
                    } else {
                        let mut x = gauss(&mut rng);
                        for _ in 0..len {
                            series.push(x);
                            x = phi * x + innovation * gauss(&mut rng);
                        }
                    }
                    latents.push(series);
                }
            }
        }
        Ok(Self {
            geometry,
            rate,
            len,
            latents,
        })
    }

    pub fn geometry(&self) -> &GainGeometry {
        &self.geometry
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Latent (re, im) deviation drivers of one subchannel.
    pub fn latent(&self, rx: usize, tx: usize) -> (&[f64], &[f64]) {
        let base = (rx * self.geometry.n_tx + tx) * 2;
        (&self.latents[base], &self.latents[base + 1])
    }

    /// Complex gain of subchannel (rx, tx) at `freq` at latent step `idx`.
    pub fn gain(&self, rx: usize, tx: usize, freq: f64, idx: usize) -> Complex64 {
        let (u, v) = self.latent(rx, tx);
        let dev = Complex64::new(u[idx], v[idx]) * self.geometry.deviation_sigma;
        self.geometry.mean_at(rx, tx, freq) + dev
    }

    /// Full gain trajectory of one subchannel at one carrier.
    pub fn trajectory(&self, rx: usize, tx: usize, freq: f64) -> Vec<Complex64> {
        (0..self.len).map(|i| self.gain(rx, tx, freq, i)).collect()
    }
}

/// Standard-geometry channel evolution for the default bench scale.
pub fn evolve_channel(
    profile: &ActivityProfile,
    duration: f64,
    rate: f64,
    seed: u64,
) -> Result<ChannelProcess, SimError> {
    ChannelProcess::generate(
        GainGeometry::standard(0.15, profile.fade_depth),
        profile,
        duration,
        rate,
        seed,
    )
}
