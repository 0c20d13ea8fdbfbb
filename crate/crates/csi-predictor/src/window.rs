use crate::error::PredictorError;
use skin_sim::{ImuStream, SensorSet};

/// Overlapping per-window feature blocks cut from selected IMU axes.
/// Block `w` covers samples `[w*hop, w*hop + window)` and is stored
/// timestep-major: `block[t * n_axes + axis]`.
#[derive(Debug, Clone)]
pub struct FeatureBlocks {
    pub blocks: Vec<Vec<f64>>,
    pub window: usize,
    pub hop: usize,
    pub n_axes: usize,
}

/// Slices an IMU stream into `(window x L)` blocks aligned with the truth
/// windows. Axis selection follows the sensor set; standardization is a
/// separate, train-split-only step (see [`Standardizer`]).
pub fn window_imu(
    imu: &ImuStream,
    sensor: SensorSet,
    window: usize,
    hop: usize,
) -> Result<FeatureBlocks, PredictorError> {
    let n = imu.n_samples();
    if n < window || window == 0 {
        return Err(PredictorError::StreamTooShort { len: n, window });
    }
    if hop == 0 {
        return Err(PredictorError::ShapeMismatch("hop must be positive".into()));
    }
    let axes = sensor.axis_indices();
    let n_blocks = (n - window) / hop + 1;
    let mut blocks = Vec::with_capacity(n_blocks);
    for w in 0..n_blocks {
        let start = w * hop;
        let mut block = Vec::with_capacity(window * axes.len());
        for t in 0..window {
            for &a in axes {
                block.push(imu.value(start + t, a));
            }
        }
        blocks.push(block);
    }
    Ok(FeatureBlocks {
        blocks,
        window,
        hop,
        n_axes: axes.len(),
    })
}

/// Per-axis mean/std standardization fitted on the training split only.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Fits on the blocks at `train_indices`.
    pub fn fit(
        blocks: &[Vec<f64>],
        n_axes: usize,
        train_indices: &[usize],
    ) -> Result<Self, PredictorError> {
        if train_indices.is_empty() {
            return Err(PredictorError::EmptyTraining);
        }
        let mut mean = vec![0.0; n_axes];
        let mut count = 0usize;
        for &i in train_indices {
            for (k, v) in blocks[i].iter().enumerate() {
                mean[k % n_axes] += v;
            }
            count += blocks[i].len() / n_axes;
        }
        for m in mean.iter_mut() {
            *m /= count as f64;
        }
        let mut var = vec![0.0; n_axes];
        for &i in train_indices {
            for (k, v) in blocks[i].iter().enumerate() {
                let d = v - mean[k % n_axes];
                var[k % n_axes] += d * d;
            }
        }
        let std = var
            .iter()
            .map(|v| (v / count as f64).sqrt().max(1e-12))
            .collect();
        Ok(Self { mean, std })
    }

    pub fn apply(&self, block: &[f64]) -> Vec<f64> {
        let n_axes = self.mean.len();
        block
            .iter()
            .enumerate()
            .map(|(k, v)| (v - self.mean[k % n_axes]) / self.std[k % n_axes])
            .collect()
    }

    pub fn apply_all(&self, blocks: &[Vec<f64>]) -> Vec<Vec<f64>> {
        blocks.iter().map(|b| self.apply(b)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(n: usize) -> ImuStream {
        ImuStream::from_axes((0..n * 6).map(|i| (i % 13) as f64).collect(), 300.0)
    }

    #[test]
    fn block_count_for_non_overlapping_windows() {
        let s = stream(90_000);
        let fb = window_imu(&s, SensorSet::All, 30, 30).unwrap();
        assert_eq!(fb.blocks.len(), 3000);
        assert_eq!(fb.blocks[0].len(), 30 * 6);
    }

    #[test]
    fn block_count_for_unit_hop() {
        let s = stream(90_000);
        let fb = window_imu(&s, SensorSet::Gyro, 30, 1).unwrap();
        assert_eq!(fb.blocks.len(), 90_000 - 29);
        assert_eq!(fb.n_axes, 3);
    }

    #[test]
    fn constant_stream_standardizes_to_zero() {
        let s = ImuStream::from_axes(vec![5.0; 600], 300.0);
        let fb = window_imu(&s, SensorSet::All, 30, 30).unwrap();
        let idx: Vec<usize> = (0..fb.blocks.len()).collect();
        let st = Standardizer::fit(&fb.blocks, fb.n_axes, &idx).unwrap();
        for b in st.apply_all(&fb.blocks) {
            assert!(b.iter().all(|&v| v.abs() < 1e-9));
        }
    }

    #[test]
    fn too_short_stream_rejected() {
        let s = stream(10);
        assert!(matches!(
            window_imu(&s, SensorSet::All, 30, 30),
            Err(PredictorError::StreamTooShort { .. })
        ));
    }

    #[test]
    fn standardizer_uses_train_stats_only() {
        let mut data = vec![0.0; 60 * 6];
        for (i, v) in data.iter_mut().enumerate() {
            *v = if i < 30 * 6 { 1.0 } else { 100.0 };
        }
        let s = ImuStream::from_axes(data, 300.0);
        let fb = window_imu(&s, SensorSet::All, 30, 30).unwrap();
        let st = Standardizer::fit(&fb.blocks, 6, &[0]).unwrap();
        // Train block becomes zero; held-out block keeps its offset.
        assert!(st.apply(&fb.blocks[0]).iter().all(|v| v.abs() < 1e-6));
        assert!(st.apply(&fb.blocks[1]).iter().all(|v| v.abs() > 1.0));
    }
}
