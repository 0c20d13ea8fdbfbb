use crate::error::PredictorError;
use signal_core::wrap_phase;

/// Level counts and the amplitude range the uniform bins cover. Phase bins
/// always cover `[-pi, pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationScheme {
    pub amp_levels: usize,
    pub phase_levels: usize,
    pub amp_min: f64,
    pub amp_max: f64,
}

impl QuantizationScheme {
    pub fn new(
        amp_levels: usize,
        phase_levels: usize,
        amp_min: f64,
        amp_max: f64,
    ) -> Result<Self, PredictorError> {
        if amp_levels < 2 {
            return Err(PredictorError::TooFewLevels(amp_levels));
        }
        if phase_levels < 2 {
            return Err(PredictorError::TooFewLevels(phase_levels));
        }
        if !(amp_min < amp_max) {
            return Err(PredictorError::BadRange(amp_min, amp_max));
        }
        Ok(Self {
            amp_levels,
            phase_levels,
            amp_min,
            amp_max,
        })
    }

    pub fn amplitude_dictionary(&self) -> LevelDictionary {
        LevelDictionary::uniform(self.amp_min, self.amp_max, self.amp_levels)
    }

    pub fn phase_dictionary(&self) -> LevelDictionary {
        LevelDictionary::phase(self.phase_levels)
    }
}

/// Representative value per quantization level: uniform bins over a range,
/// dictionary entries at the bin centres, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelDictionary {
    min: f64,
    max: f64,
    values: Vec<f64>,
    wraps: bool,
}

impl LevelDictionary {
    pub fn uniform(min: f64, max: f64, levels: usize) -> Self {
        let bin = (max - min) / levels as f64;
        let values = (0..levels).map(|i| min + (i as f64 + 0.5) * bin).collect();
        Self {
            min,
            max,
            values,
            wraps: false,
        }
    }

    /// Uniform bins over `[-pi, pi)`.
    pub fn phase(levels: usize) -> Self {
        let mut d = Self::uniform(-std::f64::consts::PI, std::f64::consts::PI, levels);
        d.wraps = true;
        d
    }

    /// Fits uniform amplitude bins to the observed range of training values.
    pub fn fit_amplitude(train_values: &[f64], levels: usize) -> Result<Self, PredictorError> {
        if train_values.is_empty() {
            return Err(PredictorError::EmptyTraining);
        }
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in train_values {
            min = min.min(v);
            max = max.max(v);
        }
        if !(min < max) {
            // Degenerate constant series: widen a hair so binning stays
            // defined.
            max = min + min.abs().max(1e-9) * 1e-6;
        }
        Ok(Self::uniform(min, max, levels))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn wraps(&self) -> bool {
        self.wraps
    }

    pub fn bin_width(&self) -> f64 {
        (self.max - self.min) / self.values.len() as f64
    }

    /// Nearest-level index; out-of-range values clamp to the boundary
    /// levels. Phase inputs are wrapped first.
    pub fn quantize(&self, value: f64) -> usize {
        let v = if self.wraps { wrap_phase(value) } else { value };
        let bin = self.bin_width();
        let idx = ((v - self.min) / bin).floor();
        idx.clamp(0.0, (self.values.len() - 1) as f64) as usize
    }

    /// Representative value of a level.
    pub fn dequantize(&self, level: usize) -> f64 {
        self.values[level.min(self.values.len() - 1)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn amplitude_boundaries() {
        let d = LevelDictionary::uniform(0.0, 1.0, 16);
        assert_eq!(d.quantize(0.0), 0);
        assert_eq!(d.quantize(-5.0), 0);
        assert_eq!(d.quantize(0.999999), 15);
        assert_eq!(d.quantize(7.0), 15);
    }

    #[test]
    fn phase_boundaries() {
        let d = LevelDictionary::phase(32);
        assert_eq!(d.quantize(-std::f64::consts::PI), 0);
        assert_eq!(d.quantize(std::f64::consts::PI - 1e-9), 31);
        // +pi wraps to -pi.
        assert_eq!(d.quantize(std::f64::consts::PI), 0);
    }

    #[test]
    fn round_trip_error_within_half_bin() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let amp = LevelDictionary::uniform(0.2, 0.8, 16);
        let half = amp.bin_width() / 2.0;
        for _ in 0..2000 {
            let v = rng.gen_range(0.2..0.8);
            let err = (amp.dequantize(amp.quantize(v)) - v).abs();
            assert!(err <= half + 1e-12, "v = {v}, err = {err}");
        }
        let ph = LevelDictionary::phase(32);
        let half = ph.bin_width() / 2.0;
        for _ in 0..2000 {
            let v = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let err = (ph.dequantize(ph.quantize(v)) - v).abs();
            assert!(err <= half + 1e-12);
        }
    }

    #[test]
    fn dictionary_strictly_increasing() {
        let d = LevelDictionary::uniform(-1.0, 3.0, 7);
        for w in d.values().windows(2) {
            assert!(w[1] > w[0]);
        }
        assert_eq!(d.len(), 7);
    }

    #[test]
    fn scheme_validation() {
        assert!(QuantizationScheme::new(1, 32, 0.0, 1.0).is_err());
        assert!(QuantizationScheme::new(16, 1, 0.0, 1.0).is_err());
        assert!(QuantizationScheme::new(16, 32, 1.0, 1.0).is_err());
        let s = QuantizationScheme::new(16, 32, 0.0, 1.0).unwrap();
        assert_eq!(s.amplitude_dictionary().len(), 16);
        assert_eq!(s.phase_dictionary().len(), 32);
    }
}
