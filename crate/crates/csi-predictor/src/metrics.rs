use crate::error::PredictorError;
use crate::quantizer::LevelDictionary;
use signal_core::wrap_phase;

/// What a slot predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    Amplitude,
    Phase,
}

impl TargetKind {
    pub fn label(self) -> &'static str {
        match self {
            TargetKind::Amplitude => "amplitude",
            TargetKind::Phase => "phase",
        }
    }
}

/// Classification quality of one slot: exact-level hit rate, RMSE on the
/// dequantized values (phase differences wrapped before squaring), and the
/// full confusion matrix.
#[derive(Debug, Clone)]
pub struct PredictionReport {
    pub tpr: f64,
    pub rmse: f64,
    pub n: usize,
    pub n_classes: usize,
    /// Row-major `confusion[truth * n_classes + predicted]`.
    pub confusion: Vec<u64>,
}

/// Scores predicted against true quantization levels through a dictionary.
pub fn evaluate_levels(
    predicted: &[usize],
    truth: &[usize],
    dictionary: &LevelDictionary,
    target: TargetKind,
) -> Result<PredictionReport, PredictorError> {
    if predicted.len() != truth.len() {
        return Err(PredictorError::LengthMismatch(predicted.len(), truth.len()));
    }
    let n = predicted.len();
    let n_classes = dictionary.len();
    let mut confusion = vec![0u64; n_classes * n_classes];
    let mut correct = 0usize;
    let mut sq_sum = 0.0;
    for (&p, &g) in predicted.iter().zip(truth) {
        confusion[g * n_classes + p] += 1;
        if p == g {
            correct += 1;
        }
        let mut diff = dictionary.dequantize(g) - dictionary.dequantize(p);
        if matches!(target, TargetKind::Phase) {
            diff = wrap_phase(diff);
        }
        sq_sum += diff * diff;
    }
    Ok(PredictionReport {
        tpr: if n == 0 { 0.0 } else { correct as f64 / n as f64 },
        rmse: if n == 0 { 0.0 } else { (sq_sum / n as f64).sqrt() },
        n,
        n_classes,
        confusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions() {
        let d = LevelDictionary::uniform(0.0, 1.0, 8);
        let levels: Vec<usize> = (0..8).collect();
        let r = evaluate_levels(&levels, &levels, &d, TargetKind::Amplitude).unwrap();
        assert_eq!(r.tpr, 1.0);
        assert_eq!(r.rmse, 0.0);
        assert_eq!(r.confusion[0], 1);
    }

    #[test]
    fn constant_one_bin_offset_gives_bin_width_rmse() {
        let d = LevelDictionary::uniform(0.0, 1.6, 16);
        let truth: Vec<usize> = (0..15).collect();
        let pred: Vec<usize> = (1..16).collect();
        let r = evaluate_levels(&pred, &truth, &d, TargetKind::Amplitude).unwrap();
        assert!((r.rmse - d.bin_width()).abs() < 1e-12);
        assert_eq!(r.tpr, 0.0);
    }

    #[test]
    fn phase_differences_wrap() {
        let d = LevelDictionary::phase(32);
        // Levels 0 and 31 sit one bin apart across the wrap.
        let r = evaluate_levels(&[0], &[31], &d, TargetKind::Phase).unwrap();
        assert!(r.rmse <= d.bin_width() + 1e-12, "rmse = {}", r.rmse);
        assert!(r.rmse <= std::f64::consts::PI);
    }

    #[test]
    fn rmse_zero_iff_tpr_one() {
        let d = LevelDictionary::uniform(0.0, 1.0, 4);
        let r = evaluate_levels(&[0, 1, 2], &[0, 1, 3], &d, TargetKind::Amplitude).unwrap();
        assert!(r.tpr < 1.0 && r.rmse > 0.0);
        let r2 = evaluate_levels(&[2, 3], &[2, 3], &d, TargetKind::Amplitude).unwrap();
        assert!(r2.tpr == 1.0 && r2.rmse == 0.0);
    }

    #[test]
    fn length_mismatch_rejected() {
        let d = LevelDictionary::uniform(0.0, 1.0, 4);
        assert!(evaluate_levels(&[0], &[0, 1], &d, TargetKind::Amplitude).is_err());
    }
}
