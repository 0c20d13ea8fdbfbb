use crate::error::SignalError;
use crate::waveform::Waveform;

/// Outcome of a coherence-time measurement on an envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceResult {
    /// First lag, in seconds, at which the normalized autocorrelation of the
    /// mean-removed envelope drops below the threshold.
    pub coherence_time: f64,
    pub correlation_threshold: f64,
    /// Autocorrelation by lag (index 0 is lag zero), computed up to the
    /// crossing.
    pub autocorr: Vec<f64>,
}

/// A constant envelope has no decorrelation lag; the channel is coherent for
/// longer than the record can show.
#[derive(Debug, Clone, PartialEq)]
pub enum CoherenceOutcome {
    Finite(CoherenceResult),
    Infinite { correlation_threshold: f64 },
}

impl CoherenceOutcome {
    pub fn coherence_time(&self) -> Option<f64> {
        match self {
            CoherenceOutcome::Finite(r) => Some(r.coherence_time),
            CoherenceOutcome::Infinite { .. } => None,
        }
    }
}

/// Coherence time of an envelope: normalized autocorrelation of the
/// mean-removed series, reported at the first lag below `threshold`.
///
/// Returns [`CoherenceOutcome::Infinite`] for (numerically) constant
/// envelopes and for records whose autocorrelation never crosses the
/// threshold within the available lags.
pub fn coherence_time(env: &Waveform, threshold: f64) -> Result<CoherenceOutcome, SignalError> {
    if env.len() < 2 {
        return Err(SignalError::EnvelopeTooShort);
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(SignalError::BadThreshold(threshold));
    }
    let n = env.len();
    let mean = env.samples().iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = env.samples().iter().map(|s| s - mean).collect();
    let var: f64 = centered.iter().map(|d| d * d).sum::<f64>() / n as f64;
    let std = var.sqrt();
    if std <= mean.abs() * 1e-9 + 1e-15 {
        return Ok(CoherenceOutcome::Infinite {
            correlation_threshold: threshold,
        });
    }
    let mut autocorr = vec![1.0];
    for lag in 1..n {
        let cov: f64 = centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64;
        let r = cov / var;
        autocorr.push(r);
        if r < threshold {
            return Ok(CoherenceOutcome::Finite(CoherenceResult {
                coherence_time: lag as f64 / env.sample_rate(),
                correlation_threshold: threshold,
                autocorr,
            }));
        }
    }
    Ok(CoherenceOutcome::Infinite {
        correlation_threshold: threshold,
    })
}
