use crate::error::PredictorError;
use mimo_math::{channel_response, ChannelMatrix, Complex64};
use signal_core::wrap_phase;

/// Natural cubic spline through strictly increasing nodes.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the nodes (natural: zero at the ends).
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(xs: &[f64], ys: &[f64]) -> Result<Self, PredictorError> {
        if xs.len() != ys.len() {
            return Err(PredictorError::LengthMismatch(xs.len(), ys.len()));
        }
        if xs.len() < 3 {
            return Err(PredictorError::TooFewPilots {
                need: 3,
                got: xs.len(),
            });
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PredictorError::NonIncreasingNodes);
        }
        let n = xs.len();
        // Tridiagonal system for the interior second derivatives.
        let mut sub = vec![0.0; n];
        let mut diag = vec![1.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            sub[i] = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            sup[i] = h1 / 6.0;
            rhs[i] = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
        }
        // Thomas algorithm; the natural end rows are identity.
        for i in 1..n {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
        }
        Ok(Self {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            m,
        })
    }

    /// Evaluates inside the node span; refuses to extrapolate.
    pub fn eval(&self, x: f64) -> Result<f64, PredictorError> {
        let (lo, hi) = (self.xs[0], *self.xs.last().unwrap());
        if x < lo || x > hi {
            return Err(PredictorError::OutsidePilotSpan {
                carrier: x,
                lo,
                hi,
            });
        }
        let i = match self.xs.iter().position(|&n| x <= n) {
            Some(0) => 0,
            Some(p) => p - 1,
            None => self.xs.len() - 2,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        Ok(a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0)
    }
}

/// One pilot-carrier measurement of a single subchannel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotCsi {
    pub carrier_hz: f64,
    pub amplitude: f64,
    pub phase: f64,
}

/// Amplitude and phase at a data carrier from at least three pilots of one
/// subchannel: cubic splines over carrier frequency, phases unwrapped
/// across carriers first, the result wrapped back to `[-pi, pi)`.
pub fn interpolate_csi(pilots: &[PilotCsi], data_carrier: f64) -> Result<(f64, f64), PredictorError> {
    if pilots.len() < 3 {
        return Err(PredictorError::TooFewPilots {
            need: 3,
            got: pilots.len(),
        });
    }
    let mut sorted: Vec<PilotCsi> = pilots.to_vec();
    sorted.sort_by(|a, b| a.carrier_hz.partial_cmp(&b.carrier_hz).unwrap());
    let xs: Vec<f64> = sorted.iter().map(|p| p.carrier_hz).collect();
    let amps: Vec<f64> = sorted.iter().map(|p| p.amplitude).collect();
    let mut phases: Vec<f64> = sorted.iter().map(|p| p.phase).collect();
    for i in 1..phases.len() {
        let mut d = phases[i] - phases[i - 1];
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        phases[i] = phases[i - 1] + d;
    }
    let amp = CubicSpline::natural(&xs, &amps)?.eval(data_carrier)?;
    let phase = CubicSpline::natural(&xs, &phases)?.eval(data_carrier)?;
    Ok((amp, wrap_phase(phase)))
}

/// Assembles the channel matrix at a data carrier from per-subchannel pilot
/// sets, indexed `(rx-1) * n_tx + (tx-1)`.
pub fn interpolate_matrix(
    pilots_by_subchannel: &[Vec<PilotCsi>],
    n_rx: usize,
    n_tx: usize,
    data_carrier: f64,
) -> Result<ChannelMatrix, PredictorError> {
    if pilots_by_subchannel.len() != n_rx * n_tx {
        return Err(PredictorError::ShapeMismatch(format!(
            "expected {} subchannel pilot sets, got {}",
            n_rx * n_tx,
            pilots_by_subchannel.len()
        )));
    }
    let mut entries = Vec::with_capacity(n_rx * n_tx);
    for pilots in pilots_by_subchannel {
        let (amp, phase) = interpolate_csi(pilots, data_carrier)?;
        // Negative spline overshoot clamps to zero magnitude.
        entries.push(if amp > 0.0 {
            channel_response(amp, phase, 1.0, 0.0)?
        } else {
            Complex64::new(0.0, 0.0)
        });
    }
    Ok(ChannelMatrix::new(n_rx, n_tx, entries)?)
}
