use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::SignalError;

/// Uniformly sampled real-valued time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    sample_rate: f64,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self, SignalError> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(SignalError::BadSampleRate(sample_rate));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(SignalError::NonFiniteSample);
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    /// Raw little-endian binary format: sample rate as an 8-byte float,
    /// sample count as an 8-byte unsigned integer, then 8-byte float samples.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<(), SignalError> {
        w.write_all(&self.sample_rate.to_le_bytes())?;
        w.write_all(&(self.samples.len() as u64).to_le_bytes())?;
        for s in &self.samples {
            w.write_all(&s.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self, SignalError> {
        let mut f8 = [0u8; 8];
        r.read_exact(&mut f8)?;
        let sample_rate = f64::from_le_bytes(f8);
        r.read_exact(&mut f8)?;
        let count = u64::from_le_bytes(f8) as usize;
        let mut samples = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut f8)?;
            samples.push(f64::from_le_bytes(f8));
        }
        Self::new(samples, sample_rate)
    }

    pub fn write_binary_file<P: AsRef<Path>>(&self, path: P) -> Result<(), SignalError> {
        let file = std::fs::File::create(path)?;
        self.write_binary(BufWriter::new(file))
    }

    pub fn read_binary_file<P: AsRef<Path>>(path: P) -> Result<Self, SignalError> {
        let file = std::fs::File::open(path)?;
        Self::read_binary(BufReader::new(file))
    }

    /// Columnar text format: a `# sample_rate = <hz>` header line, a
    /// `time,value` header, then one `time,value` row per sample.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<(), SignalError> {
        writeln!(w, "# sample_rate = {}", self.sample_rate)?;
        writeln!(w, "time,value")?;
        for (k, s) in self.samples.iter().enumerate() {
            writeln!(w, "{},{}", k as f64 / self.sample_rate, s)?;
        }
        Ok(())
    }

    pub fn read_text<R: Read>(r: R) -> Result<Self, SignalError> {
        let reader = BufReader::new(r);
        let mut sample_rate = None;
        let mut samples = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line == "time,value" {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(value) = rest.split('=').nth(1) {
                    sample_rate = Some(value.trim().parse::<f64>().map_err(|e| {
                        SignalError::MalformedFile(format!("bad sample_rate: {e}"))
                    })?);
                }
                continue;
            }
            let value = line
                .split(',')
                .nth(1)
                .ok_or_else(|| SignalError::MalformedFile(format!("bad row: {line}")))?;
            samples.push(
                value
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| SignalError::MalformedFile(format!("bad value: {e}")))?,
            );
        }
        let sample_rate = sample_rate
            .ok_or_else(|| SignalError::MalformedFile("missing sample_rate header".into()))?;
        Self::new(samples, sample_rate)
    }
}

/// Synthesizes `amplitude * sin(2*pi*freq*t + phase)` sampled at
/// `sample_rate` for `duration` seconds.
pub fn synth_tone(
    freq: f64,
    amplitude: f64,
    phase: f64,
    duration: f64,
    sample_rate: f64,
) -> Result<Waveform, SignalError> {
    if !(sample_rate > 0.0) {
        return Err(SignalError::BadSampleRate(sample_rate));
    }
    if !(freq > 0.0) || freq >= sample_rate / 2.0 {
        return Err(SignalError::NyquistViolation { freq, sample_rate });
    }
    let n = (duration * sample_rate).round() as usize;
    let w = 2.0 * std::f64::consts::PI * freq / sample_rate;
    let samples = (0..n)
        .map(|k| amplitude * (w * k as f64 + phase).sin())
        .collect();
    Waveform::new(samples, sample_rate)
}
