use std::io::{BufRead, BufReader, Read, Write};

use num_complex::Complex64;

use crate::error::SimError;
use mimo_math::ChannelMatrix;

/// Window-averaged complex gain of one subchannel at one carrier.
/// `rx` and `tx` are 1-based, matching the h_mn naming in reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthRecord {
    pub window_index: usize,
    pub carrier_hz: f64,
    pub rx: usize,
    pub tx: usize,
    pub gain: Complex64,
}

/// Per-window ground-truth channel matrices for every carrier of interest
/// (pilots plus the data carrier), stored in a fixed window-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthSeries {
    records: Vec<TruthRecord>,
    carriers: Vec<f64>, // ascending
    n_windows: usize,
    n_rx: usize,
    n_tx: usize,
}

impl TruthSeries {
    pub fn new(
        records: Vec<TruthRecord>,
        carriers: Vec<f64>,
        n_windows: usize,
        n_rx: usize,
        n_tx: usize,
    ) -> Self {
        assert_eq!(records.len(), n_windows * carriers.len() * n_rx * n_tx);
        Self {
            records,
            carriers,
            n_windows,
            n_rx,
            n_tx,
        }
    }

    pub fn records(&self) -> &[TruthRecord] {
        &self.records
    }

    pub fn n_windows(&self) -> usize {
        self.n_windows
    }

    pub fn carriers(&self) -> &[f64] {
        &self.carriers
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    fn carrier_index(&self, carrier: f64) -> Option<usize> {
        self.carriers.iter().position(|&c| c == carrier)
    }

    /// Gain of subchannel (rx, tx) (1-based) in a window.
    pub fn gain(&self, window: usize, carrier: f64, rx: usize, tx: usize) -> Option<Complex64> {
        let ci = self.carrier_index(carrier)?;
        if window >= self.n_windows || rx == 0 || tx == 0 || rx > self.n_rx || tx > self.n_tx {
            return None;
        }
        let idx = ((window * self.carriers.len() + ci) * self.n_rx + (rx - 1)) * self.n_tx
            + (tx - 1);
        Some(self.records[idx].gain)
    }

    /// Full channel matrix of a window at a carrier.
    pub fn channel_matrix(&self, window: usize, carrier: f64) -> Option<ChannelMatrix> {
        let mut entries = Vec::with_capacity(self.n_rx * self.n_tx);
        for rx in 1..=self.n_rx {
            for tx in 1..=self.n_tx {
                entries.push(self.gain(window, carrier, rx, tx)?);
            }
        }
        ChannelMatrix::new(self.n_rx, self.n_tx, entries).ok()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), SimError> {
        writeln!(w, "window_index,carrier_hz,rx,tx,re,im")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.window_index, r.carrier_hz, r.rx, r.tx, r.gain.re, r.gain.im
            )?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, SimError> {
        let reader = BufReader::new(r);
        let mut records = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with("window_index") {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(SimError::MalformedTruth(format!("bad row: {line}")));
            }
            let parse = |s: &str| -> Result<f64, SimError> {
                s.trim()
                    .parse()
                    .map_err(|e| SimError::MalformedTruth(format!("bad number {s}: {e}")))
            };
            records.push(TruthRecord {
                window_index: parse(f[0])? as usize,
                carrier_hz: parse(f[1])?,
                rx: parse(f[2])? as usize,
                tx: parse(f[3])? as usize,
                gain: Complex64::new(parse(f[4])?, parse(f[5])?),
            });
        }
        if records.is_empty() {
            return Err(SimError::MalformedTruth("no records".into()));
        }
        let mut carriers: Vec<f64> = Vec::new();
        let mut n_rx = 0;
        let mut n_tx = 0;
        let mut n_windows = 0;
        for r in &records {
            if !carriers.contains(&r.carrier_hz) {
                carriers.push(r.carrier_hz);
            }
            n_rx = n_rx.max(r.rx);
            n_tx = n_tx.max(r.tx);
            n_windows = n_windows.max(r.window_index + 1);
        }
        carriers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if records.len() != n_windows * carriers.len() * n_rx * n_tx {
            return Err(SimError::MalformedTruth(format!(
                "expected {} records, found {}",
                n_windows * carriers.len() * n_rx * n_tx,
                records.len()
            )));
        }
        Ok(Self::new(records, carriers, n_windows, n_rx, n_tx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_series() -> TruthSeries {
        let carriers = vec![90.0, 100.0];
        let mut records = Vec::new();
        for w in 0..3 {
            for &c in &carriers {
                for rx in 1..=2 {
                    for tx in 1..=2 {
                        records.push(TruthRecord {
                            window_index: w,
                            carrier_hz: c,
                            rx,
                            tx,
                            gain: Complex64::new(w as f64 + c, (rx * 10 + tx) as f64),
                        });
                    }
                }
            }
        }
        TruthSeries::new(records, carriers, 3, 2, 2)
    }

    #[test]
    fn lookup_and_matrix() {
        let t = sample_series();
        let g = t.gain(1, 100.0, 2, 1).unwrap();
        assert_eq!(g, Complex64::new(101.0, 21.0));
        let h = t.channel_matrix(0, 90.0).unwrap();
        assert_eq!(h.get(0, 0), Complex64::new(90.0, 11.0));
        assert_eq!(h.get(1, 1), Complex64::new(90.0, 22.0));
        assert!(t.channel_matrix(0, 125.0).is_none());
    }

    #[test]
    fn csv_round_trip() {
        let t = sample_series();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = TruthSeries::read_csv(buf.as_slice()).unwrap();
        assert_eq!(t, back);
    }
}
