use crate::error::SignalError;
use crate::waveform::Waveform;

/// Amplitude and phase of a single known frequency, measured over a window.
///
/// Phase is sine-referenced against global record time (t = 0 at the first
/// sample of the waveform, not of the window) and wrapped to `[-pi, pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToneEstimate {
    pub amplitude: f64,
    pub phase: f64,
    pub frequency: f64,
}

/// Wraps a phase to `[-pi, pi)`.
pub fn wrap_phase(p: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let x = (p + std::f64::consts::PI).rem_euclid(two_pi) - std::f64::consts::PI;
    if x >= std::f64::consts::PI {
        -std::f64::consts::PI
    } else {
        x
    }
}

/// Least-squares fit of `a*sin(2*pi*f*t) + b*cos(2*pi*f*t)` over the window
/// `[window_start, window_start + window_len)`. The window must cover at
/// least two full cycles of `freq`. A zero window yields amplitude 0 and
/// phase 0 by convention.
pub fn estimate_tone(
    w: &Waveform,
    freq: f64,
    window_start: usize,
    window_len: usize,
) -> Result<ToneEstimate, SignalError> {
    let fs = w.sample_rate();
    if !(freq > 0.0) || freq >= fs / 2.0 {
        return Err(SignalError::NyquistViolation {
            freq,
            sample_rate: fs,
        });
    }
    if window_start + window_len > w.len() || window_len == 0 {
        return Err(SignalError::WindowOutOfBounds {
            start: window_start,
            len: window_len,
            available: w.len(),
        });
    }
    if (window_len as f64) < 2.0 * fs / freq {
        return Err(SignalError::WindowTooShort {
            len: window_len,
            freq,
            sample_rate: fs,
        });
    }
    let omega = 2.0 * std::f64::consts::PI * freq / fs;
    let (mut sss, mut scc, mut ssc, mut sys, mut syc) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for k in 0..window_len {
        let t = (window_start + k) as f64;
        let (s, c) = (omega * t).sin_cos();
        let y = w.samples()[window_start + k];
        sss += s * s;
        scc += c * c;
        ssc += s * c;
        sys += y * s;
        syc += y * c;
    }
    let det = sss * scc - ssc * ssc;
    // det ~ (len/2)^2 for two or more cycles; guarded by the length check.
    let a = (scc * sys - ssc * syc) / det;
    let b = (sss * syc - ssc * sys) / det;
    let amplitude = a.hypot(b);
    let phase = if amplitude > 0.0 {
        wrap_phase(b.atan2(a))
    } else {
        0.0
    };
    Ok(ToneEstimate {
        amplitude,
        phase,
        frequency: freq,
    })
}

/// Per-window amplitude sequence of a known carrier: one [`estimate_tone`]
/// per hop, producing a waveform at `sample_rate / hop`.
pub fn envelope(
    w: &Waveform,
    carrier_freq: f64,
    hop: usize,
    window: usize,
) -> Result<Waveform, SignalError> {
    if hop == 0 {
        return Err(SignalError::ZeroHop);
    }
    let mut amps = Vec::new();
    let mut start = 0;
    while start + window <= w.len() {
        amps.push(estimate_tone(w, carrier_freq, start, window)?.amplitude);
        start += hop;
    }
    Waveform::new(amps, w.sample_rate() / hop as f64)
}
