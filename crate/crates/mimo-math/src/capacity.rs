use crate::error::MimoError;
use crate::matrix::ChannelMatrix;
use crate::svd::{svd, SvdDecomposition};

/// Transmit precoder `W` (n_tx x n_streams) and receive decoder `Gamma`
/// (n_streams x n_rx) derived from an SVD of the estimated channel:
/// `W = V`, `Gamma = U^H`, with the stream count fixed to `min(n_rx, n_tx)`.
#[derive(Debug, Clone)]
pub struct PrecodingPair {
    precoder: ChannelMatrix,
    decoder: ChannelMatrix,
}

impl PrecodingPair {
    pub fn precoder(&self) -> &ChannelMatrix {
        &self.precoder
    }

    pub fn decoder(&self) -> &ChannelMatrix {
        &self.decoder
    }

    pub fn n_streams(&self) -> usize {
        self.precoder.n_tx()
    }
}

/// Effective channel `Phi = Gamma * H * W` seen by the spatial streams.
#[derive(Debug, Clone)]
pub struct EffectiveChannel {
    phi: ChannelMatrix,
}

impl EffectiveChannel {
    pub fn phi(&self) -> &ChannelMatrix {
        &self.phi
    }
}

pub fn precoding_pair(dec: &SvdDecomposition) -> PrecodingPair {
    let n_streams = dec.sigma().len();
    let u = dec.u();
    let v = dec.v();
    // First n_streams columns of V / rows of U^H.
    let mut w = ChannelMatrix::zeros(v.n_rx(), n_streams);
    for r in 0..v.n_rx() {
        for s in 0..n_streams {
            w.set(r, s, v.get(r, s));
        }
    }
    let mut gamma = ChannelMatrix::zeros(n_streams, u.n_rx());
    for s in 0..n_streams {
        for r in 0..u.n_rx() {
            gamma.set(s, r, u.get(r, s).conj());
        }
    }
    PrecodingPair {
        precoder: w,
        decoder: gamma,
    }
}

pub fn effective_channel(
    pair: &PrecodingPair,
    h_true: &ChannelMatrix,
) -> Result<EffectiveChannel, MimoError> {
    let phi = pair.decoder.mul(h_true)?.mul(&pair.precoder)?;
    Ok(EffectiveChannel { phi })
}

/// Per-stream SINR with equal power split `s = snr / n_tx`:
/// `SINR_i = |phi_ii|^2 s / (sum_{j != i} |phi_ij|^2 s + 1)`.
pub fn stream_sinrs(phi: &ChannelMatrix, snr: f64, n_tx: usize) -> Result<Vec<f64>, MimoError> {
    if !(snr > 0.0) {
        return Err(MimoError::NonPositiveSnr(snr));
    }
    if n_tx == 0 {
        return Err(MimoError::NoStreams);
    }
    let s = snr / n_tx as f64;
    let n = phi.n_rx().min(phi.n_tx());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let signal = phi.get(i, i).norm_sqr() * s;
        let mut interference = 0.0;
        for j in 0..phi.n_tx() {
            if j != i {
                interference += phi.get(i, j).norm_sqr() * s;
            }
        }
        out.push(signal / (interference + 1.0));
    }
    Ok(out)
}

/// Effective capacity in bit/s/Hz of an SVD-precoded link built from the
/// estimated channel and evaluated against the true one. The precoder and
/// decoder come from `svd(h_est)`; streams interfere through the off-diagonal
/// leakage of `Phi = Gamma * h_true * W` whenever the estimate is imperfect.
pub fn effective_capacity(
    h_true: &ChannelMatrix,
    h_est: &ChannelMatrix,
    snr: f64,
    n_tx: usize,
) -> Result<f64, MimoError> {
    if h_true.n_rx() != h_est.n_rx() || h_true.n_tx() != h_est.n_tx() {
        return Err(MimoError::DimensionMismatch {
            lhs: format!("{}x{}", h_true.n_rx(), h_true.n_tx()),
            rhs: format!("{}x{}", h_est.n_rx(), h_est.n_tx()),
        });
    }
    let pair = precoding_pair(&svd(h_est)?);
    let eff = effective_channel(&pair, h_true)?;
    let sinrs = stream_sinrs(eff.phi(), snr, n_tx)?;
    Ok(sinrs.iter().map(|s| (1.0 + s).log2()).sum())
}

/// Mean single-link capacity over all subchannels:
/// `mean_mn log2(1 + |h_mn|^2 * snr)`.
pub fn siso_capacity(h: &ChannelMatrix, snr: f64) -> Result<f64, MimoError> {
    if !(snr > 0.0) {
        return Err(MimoError::NonPositiveSnr(snr));
    }
    let total: f64 = h
        .entries()
        .iter()
        .map(|z| (1.0 + z.norm_sqr() * snr).log2())
        .sum();
    Ok(total / h.entries().len() as f64)
}
