use crate::error::SignalError;
use crate::waveform::Waveform;

/// Passband description for a linear-phase FIR bandpass filter.
///
/// The passband is `[low_cut, high_cut]`; attenuation reaches
/// `stopband_attenuation_db` beyond `low_cut - transition_width` and
/// `high_cut + transition_width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandpassSpec {
    pub low_cut: f64,
    pub high_cut: f64,
    pub transition_width: f64,
    pub stopband_attenuation_db: f64,
}

impl BandpassSpec {
    pub fn new(low_cut: f64, high_cut: f64, transition_width: f64, attenuation_db: f64) -> Self {
        Self {
            low_cut,
            high_cut,
            transition_width,
            stopband_attenuation_db: attenuation_db,
        }
    }

    /// Narrow band around a single pilot carrier, sized so the neighbouring
    /// carrier 10 Hz away falls fully inside the stopband.
    pub fn around_carrier(freq: f64) -> Self {
        Self::new(freq - 4.0, freq + 4.0, 5.0, 60.0)
    }

    pub fn validate(&self, sample_rate: f64) -> Result<(), SignalError> {
        let fail = |reason: &str| {
            Err(SignalError::BadBandpassSpec {
                sample_rate,
                reason: reason.to_string(),
            })
        };
        if !(self.low_cut > 0.0) || !(self.high_cut > self.low_cut) {
            return fail("need 0 < low_cut < high_cut");
        }
        if !(self.transition_width > 0.0) {
            return fail("transition width must be positive");
        }
        if !(self.stopband_attenuation_db > 0.0) {
            return fail("attenuation must be positive");
        }
        if self.high_cut + self.transition_width / 2.0 >= sample_rate / 2.0 {
            return fail("high_cut + transition/2 must stay below Nyquist");
        }
        if self.low_cut - self.transition_width / 2.0 <= 0.0 {
            return fail("low_cut - transition/2 must stay above 0");
        }
        Ok(())
    }
}

fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 1..64 {
        term *= (half / k as f64) * (half / k as f64);
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    sum
}

fn kaiser_beta(attenuation_db: f64) -> f64 {
    if attenuation_db > 50.0 {
        0.1102 * (attenuation_db - 8.7)
    } else if attenuation_db >= 21.0 {
        0.5842 * (attenuation_db - 21.0).powf(0.4) + 0.07886 * (attenuation_db - 21.0)
    } else {
        0.0
    }
}

/// Kaiser windowed-sinc bandpass taps. The tap count follows from the
/// transition width and attenuation and is forced odd so the group delay is
/// an integer number of samples.
pub fn design_bandpass_taps(spec: &BandpassSpec, sample_rate: f64) -> Result<Vec<f64>, SignalError> {
    spec.validate(sample_rate)?;
    let delta_omega = 2.0 * std::f64::consts::PI * spec.transition_width / sample_rate;
    let mut num_taps =
        (((spec.stopband_attenuation_db - 7.95) / (2.285 * delta_omega)).ceil() as usize).max(3);
    if num_taps % 2 == 0 {
        num_taps += 1;
    }
    let beta = kaiser_beta(spec.stopband_attenuation_db);
    let i0_beta = bessel_i0(beta);
    // Ideal cutoffs sit mid-transition.
    let f1 = spec.low_cut - spec.transition_width / 2.0;
    let f2 = spec.high_cut + spec.transition_width / 2.0;
    let w1 = 2.0 * std::f64::consts::PI * f1 / sample_rate;
    let w2 = 2.0 * std::f64::consts::PI * f2 / sample_rate;
    let mid = (num_taps - 1) as f64 / 2.0;
    let taps = (0..num_taps)
        .map(|n| {
            let x = n as f64 - mid;
            let ideal = if x == 0.0 {
                (w2 - w1) / std::f64::consts::PI
            } else {
                ((w2 * x).sin() - (w1 * x).sin()) / (std::f64::consts::PI * x)
            };
            let r = 2.0 * x / (num_taps - 1) as f64;
            let window = bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / i0_beta;
            ideal * window
        })
        .collect();
    Ok(taps)
}

/// Zero-phase FIR bandpass: filters with symmetric taps and compensates the
/// group delay by symmetric zero padding and trimming, so the output has the
/// same length and alignment as the input.
pub fn bandpass(w: &Waveform, spec: &BandpassSpec) -> Result<Waveform, SignalError> {
    let taps = design_bandpass_taps(spec, w.sample_rate())?;
    let gd = (taps.len() - 1) / 2;
    let x = w.samples();
    let n = x.len();
    let mut out = vec![0.0; n];
    for (k, o) in out.iter_mut().enumerate() {
        // out[k] = sum_j taps[j] * x[k + gd - j], zero outside the record
        let j_lo = (k + gd).saturating_sub(n - 1);
        let j_hi = (k + gd).min(taps.len() - 1);
        let mut acc = 0.0;
        let base = k + gd;
        for (j, tap) in taps.iter().enumerate().take(j_hi + 1).skip(j_lo) {
            acc += tap * x[base - j];
        }
        *o = acc;
    }
    Waveform::new(out, w.sample_rate())
}
