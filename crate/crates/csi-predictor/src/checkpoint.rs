use std::io::{Read, Write};
use std::path::Path;

use crate::error::PredictorError;
use crate::lstm::LstmModel;
use crate::metrics::TargetKind;
use crate::pipeline::SlotSpec;
use crate::quantizer::LevelDictionary;
use crate::train::TrainedSlot;
use crate::window::Standardizer;
use skin_sim::SensorSet;

const MAGIC: &[u8; 8] = b"SMCKPT01";
const VERSION: u32 = 1;

/// A trained slot as stored on disk: model weights plus the quantizer
/// dictionary and input standardizer needed to run it on fresh data.
#[derive(Debug, Clone)]
pub struct SlotCheckpoint {
    pub spec: SlotSpec,
    pub model: LstmModel,
    pub standardizer: Standardizer,
    pub dictionary: LevelDictionary,
}

impl From<&TrainedSlot> for SlotCheckpoint {
    fn from(t: &TrainedSlot) -> Self {
        Self {
            spec: t.dataset_meta.clone(),
            model: t.model.clone(),
            standardizer: t.standardizer.clone(),
            dictionary: t.dictionary.clone(),
        }
    }
}

fn write_f64s<W: Write>(w: &mut W, xs: &[f64]) -> std::io::Result<()> {
    w.write_all(&(xs.len() as u64).to_le_bytes())?;
    for x in xs {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64, PredictorError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64, PredictorError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn read_f64s<R: Read>(r: &mut R) -> Result<Vec<f64>, PredictorError> {
    let n = read_u64(r)? as usize;
    if n > 1 << 28 {
        return Err(PredictorError::MalformedCheckpoint(format!(
            "implausible array length {n}"
        )));
    }
    (0..n).map(|_| read_f64(r)).collect()
}

/// Versioned little-endian binary checkpoint: magic, schema version, slot
/// identity, shapes, then the weight and helper arrays.
pub fn save_model<P: AsRef<Path>>(path: P, ckpt: &SlotCheckpoint) -> Result<(), PredictorError> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&ckpt.spec.carrier_hz.to_le_bytes())?;
    w.write_all(&(ckpt.spec.rx as u64).to_le_bytes())?;
    let target: u8 = match ckpt.spec.target {
        TargetKind::Amplitude => 0,
        TargetKind::Phase => 1,
    };
    let sensor: u8 = match ckpt.spec.sensor {
        SensorSet::Gyro => 0,
        SensorSet::Acc => 1,
        SensorSet::All => 2,
    };
    w.write_all(&[target, sensor])?;
    let m = &ckpt.model;
    for dim in [m.input_dim, m.window, m.hidden, m.n_classes] {
        w.write_all(&(dim as u64).to_le_bytes())?;
    }
    w.write_all(&m.dropout.to_le_bytes())?;
    write_f64s(&mut w, &m.w_ih)?;
    write_f64s(&mut w, &m.w_hh)?;
    write_f64s(&mut w, &m.b)?;
    write_f64s(&mut w, &m.w_out)?;
    write_f64s(&mut w, &m.b_out)?;
    write_f64s(&mut w, &ckpt.standardizer.mean)?;
    write_f64s(&mut w, &ckpt.standardizer.std)?;
    let d = &ckpt.dictionary;
    w.write_all(&[u8::from(d.wraps())])?;
    write_f64s(&mut w, d.values())?;
    Ok(())
}

pub fn load_model<P: AsRef<Path>>(path: P) -> Result<SlotCheckpoint, PredictorError> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(PredictorError::MalformedCheckpoint("bad magic".into()));
    }
    let mut v4 = [0u8; 4];
    r.read_exact(&mut v4)?;
    let version = u32::from_le_bytes(v4);
    if version != VERSION {
        return Err(PredictorError::MalformedCheckpoint(format!(
            "unsupported version {version}"
        )));
    }
    let carrier_hz = read_f64(&mut r)?;
    let rx = read_u64(&mut r)? as usize;
    let mut flags = [0u8; 2];
    r.read_exact(&mut flags)?;
    let target = match flags[0] {
        0 => TargetKind::Amplitude,
        1 => TargetKind::Phase,
        other => {
            return Err(PredictorError::MalformedCheckpoint(format!(
                "bad target tag {other}"
            )))
        }
    };
    let sensor = match flags[1] {
        0 => SensorSet::Gyro,
        1 => SensorSet::Acc,
        2 => SensorSet::All,
        other => {
            return Err(PredictorError::MalformedCheckpoint(format!(
                "bad sensor tag {other}"
            )))
        }
    };
    let input_dim = read_u64(&mut r)? as usize;
    let window = read_u64(&mut r)? as usize;
    let hidden = read_u64(&mut r)? as usize;
    let n_classes = read_u64(&mut r)? as usize;
    let dropout = read_f64(&mut r)?;
    let w_ih = read_f64s(&mut r)?;
    let w_hh = read_f64s(&mut r)?;
    let b = read_f64s(&mut r)?;
    let w_out = read_f64s(&mut r)?;
    let b_out = read_f64s(&mut r)?;
    let expect = [
        (w_ih.len(), input_dim * 4 * hidden),
        (w_hh.len(), hidden * 4 * hidden),
        (b.len(), 4 * hidden),
        (w_out.len(), hidden * n_classes),
        (b_out.len(), n_classes),
    ];
    for (got, want) in expect {
        if got != want {
            return Err(PredictorError::MalformedCheckpoint(format!(
                "array length {got}, expected {want}"
            )));
        }
    }
    let mean = read_f64s(&mut r)?;
    let std = read_f64s(&mut r)?;
    let mut wrap = [0u8; 1];
    r.read_exact(&mut wrap)?;
    let values = read_f64s(&mut r)?;
    if values.len() != n_classes || values.is_empty() {
        return Err(PredictorError::MalformedCheckpoint(
            "dictionary does not match class count".into(),
        ));
    }
    let dictionary = if wrap[0] == 1 {
        LevelDictionary::phase(values.len())
    } else {
        let half_bin = (values[values.len() - 1] - values[0])
            / (2.0 * (values.len() - 1).max(1) as f64);
        LevelDictionary::uniform(values[0] - half_bin, values[values.len() - 1] + half_bin, values.len())
    };
    // Guard against drift between reconstruction and the stored values.
    for (a, b) in dictionary.values().iter().zip(&values) {
        if (a - b).abs() > 1e-9 * (1.0 + b.abs()) {
            return Err(PredictorError::MalformedCheckpoint(
                "dictionary values are not uniform bins".into(),
            ));
        }
    }
    Ok(SlotCheckpoint {
        spec: SlotSpec {
            carrier_hz,
            rx,
            target,
            sensor,
        },
        model: LstmModel {
            input_dim,
            window,
            hidden,
            n_classes,
            dropout,
            w_ih,
            w_hh,
            b,
            w_out,
            b_out,
        },
        standardizer: Standardizer { mean, std },
        dictionary,
    })
}
