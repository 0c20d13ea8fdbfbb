use std::io::{BufRead, BufReader, Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::seed::derive_seed;
use signal_core::Waveform;

pub const IMU_AXES: usize = 6;
const LATENT_DIMS: usize = 4;

/// One inertial sample: timestamp plus gyro x/y/z (rad/s) then
/// accelerometer x/y/z (m/s^2).
#[derive(Debug, Clone, PartialEq)]
pub struct ImuFrame {
    pub timestamp: f64,
    pub axes: Vec<f64>,
}

/// Uniformly sampled 6-axis IMU record.
#[derive(Debug, Clone, PartialEq)]
pub struct ImuStream {
    data: Vec<f64>, // n * IMU_AXES, frame-major
    sample_rate: f64,
}

/// Which IMU axes feed a predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SensorSet {
    Gyro,
    Acc,
    All,
}

impl SensorSet {
    pub fn axis_indices(self) -> &'static [usize] {
        match self {
            SensorSet::Gyro => &[0, 1, 2],
            SensorSet::Acc => &[3, 4, 5],
            SensorSet::All => &[0, 1, 2, 3, 4, 5],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SensorSet::Gyro => "gyro",
            SensorSet::Acc => "acc",
            SensorSet::All => "acc+gyro",
        }
    }
}

impl std::str::FromStr for SensorSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gyro" => Ok(SensorSet::Gyro),
            "acc" => Ok(SensorSet::Acc),
            "all" | "acc+gyro" | "gyro+acc" => Ok(SensorSet::All),
            other => Err(format!("unknown sensor set '{other}'")),
        }
    }
}

impl ImuStream {
    pub fn from_axes(data: Vec<f64>, sample_rate: f64) -> Self {
        assert_eq!(data.len() % IMU_AXES, 0);
        Self { data, sample_rate }
    }

    pub fn n_samples(&self) -> usize {
        self.data.len() / IMU_AXES
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn frame(&self, i: usize) -> ImuFrame {
        let base = i * IMU_AXES;
        ImuFrame {
            timestamp: i as f64 / self.sample_rate,
            axes: self.data[base..base + IMU_AXES].to_vec(),
        }
    }

    pub fn value(&self, i: usize, axis: usize) -> f64 {
        self.data[i * IMU_AXES + axis]
    }

    /// One axis as a waveform (copies).
    pub fn axis_waveform(&self, axis: usize) -> Waveform {
        let samples = (0..self.n_samples()).map(|i| self.value(i, axis)).collect();
        Waveform::new(samples, self.sample_rate).expect("finite imu axis")
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), SimError> {
        writeln!(w, "# sample_rate = {}", self.sample_rate)?;
        writeln!(w, "time,gyro_x,gyro_y,gyro_z,acc_x,acc_y,acc_z")?;
        for i in 0..self.n_samples() {
            let base = i * IMU_AXES;
            write!(w, "{}", i as f64 / self.sample_rate)?;
            for a in 0..IMU_AXES {
                write!(w, ",{}", self.data[base + a])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, SimError> {
        let reader = BufReader::new(r);
        let mut sample_rate = None;
        let mut data = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with("time,") {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(value) = rest.split('=').nth(1) {
                    sample_rate = Some(value.trim().parse::<f64>().map_err(|e| {
                        SimError::MalformedScenario(format!("bad imu sample_rate: {e}"))
                    })?);
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != IMU_AXES + 1 {
                return Err(SimError::MalformedTruth(format!("bad imu row: {line}")));
            }
            for f in &fields[1..] {
                data.push(f.trim().parse::<f64>().map_err(|e| {
                    SimError::MalformedTruth(format!("bad imu value: {e}"))
                })?);
            }
        }
        let sample_rate = sample_rate
            .ok_or_else(|| SimError::MalformedScenario("missing imu sample_rate header".into()))?;
        Ok(Self { data, sample_rate })
    }
}

/// How the latent channel state couples into the co-located IMU.
///
/// Each motor excites the sensor through tones at its own pilot carriers;
/// both the tone amplitude and its phase offset are mildly saturated linear
/// mixes of that motor's four latent components. Gyro axes get deeper
/// modulation and less noise than accelerometer axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorCoupling {
    pub gyro_noise: f64,
    pub acc_noise: f64,
    pub gyro_depth: f64,
    pub acc_depth: f64,
    pub gyro_phase_span: f64,
    pub acc_phase_span: f64,
    /// Slope of the tanh saturation applied to the latent mixes.
    pub saturation: f64,
    /// Seed of the fixed mixing rows.
    pub mixing_seed: u64,
}

impl Default for SensorCoupling {
    fn default() -> Self {
        Self {
            gyro_noise: 0.02,
            acc_noise: 0.12,
            gyro_depth: 0.8,
            acc_depth: 0.8 / 3.0,
            gyro_phase_span: 1.1,
            acc_phase_span: 1.1 / 3.0,
            saturation: 0.45,
            mixing_seed: 7777,
        }
    }
}

/// Fixed mixing rows per (axis, motor): one row modulates the tone
/// amplitude, one its phase, plus a fixed phase offset.
///
/// The rows act on that motor's latent state expressed in the
/// radial/tangential basis of each subchannel (the directions that move the
/// gain magnitude and the gain phase respectively). Amplitude rows load
/// mainly on the two radial components through an orthonormal 3x2 block,
/// phase rows on the two tangential ones, with small cross terms keeping the
/// map entangled. Gyro and accelerometer triples get independent blocks.
#[derive(Debug, Clone)]
pub(crate) struct MixingBank {
    /// `[axis][motor]` -> weights over (r1, s1, r2, s2).
    pub amp_rows: Vec<Vec<[f64; LATENT_DIMS]>>,
    pub phase_rows: Vec<Vec<[f64; LATENT_DIMS]>>,
    pub phase_offsets: Vec<Vec<f64>>,
}

const CROSS_TERM: f64 = 0.2;

/// Random 3x2 matrix with orthonormal columns.
fn orthonormal_3x2(rng: &mut ChaCha8Rng) -> [[f64; 2]; 3] {
    let mut m = [[0.0f64; 2]; 3];
    loop {
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = gauss(rng);
            }
        }
        let n0 = (m[0][0] * m[0][0] + m[1][0] * m[1][0] + m[2][0] * m[2][0]).sqrt();
        for row in m.iter_mut() {
            row[0] /= n0;
        }
        let dot = m[0][0] * m[0][1] + m[1][0] * m[1][1] + m[2][0] * m[2][1];
        for row in m.iter_mut() {
            row[1] -= dot * row[0];
        }
        let n1 = (m[0][1] * m[0][1] + m[1][1] * m[1][1] + m[2][1] * m[2][1]).sqrt();
        if n1 > 1e-6 {
            for row in m.iter_mut() {
                row[1] /= n1;
            }
            return m;
        }
    }
}

impl MixingBank {
    pub fn generate(mixing_seed: u64, n_tx: usize) -> Self {
        let mut amp_rows = vec![vec![[0.0; LATENT_DIMS]; n_tx]; IMU_AXES];
        let mut phase_rows = vec![vec![[0.0; LATENT_DIMS]; n_tx]; IMU_AXES];
        let mut phase_offsets = vec![vec![0.0; n_tx]; IMU_AXES];
        for motor in 0..n_tx {
            for (group, axis_base) in [(0u64, 0usize), (1, 3)] {
                let seed = derive_seed(mixing_seed, &[0x11B0, motor as u64, group]);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let radial = orthonormal_3x2(&mut rng);
                let tangential = orthonormal_3x2(&mut rng);
                for a in 0..3 {
                    let eps = [
                        CROSS_TERM * gauss(&mut rng),
                        CROSS_TERM * gauss(&mut rng),
                        CROSS_TERM * gauss(&mut rng),
                        CROSS_TERM * gauss(&mut rng),
                    ];
                    // Layout over (r1, s1, r2, s2).
                    amp_rows[axis_base + a][motor] =
                        [radial[a][0], eps[0], radial[a][1], eps[1]];
                    phase_rows[axis_base + a][motor] =
                        [eps[2], tangential[a][0], eps[3], tangential[a][1]];
                    phase_offsets[axis_base + a][motor] =
                        rng.gen_range(-0.55 * std::f64::consts::PI..0.55 * std::f64::consts::PI);
                }
            }
        }
        Self {
            amp_rows,
            phase_rows,
            phase_offsets,
        }
    }
}

pub(crate) fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
