use num_complex::Complex64;

use crate::error::MimoError;
use crate::svd::svd;

/// Complex channel matrix, receivers on rows and transmitters on columns.
///
/// Doubles as the general dense complex matrix container used for SVD
/// factors, precoders and effective channels. Entries are validated to be
/// finite on construction, so downstream math never sees NaN/Inf.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    entries: Vec<Complex64>, // row-major
    n_rx: usize,
    n_tx: usize,
}

/// Single-frequency channel response from a pair of tone measurements:
/// `(a_rx / a_tx) * exp(j * (theta_rx - theta_tx))`.
///
/// `a_tx` is the reference amplitude of the transmitted tone and must be
/// positive; the phase convention cancels as long as both tones were measured
/// by the same estimator.
pub fn channel_response(
    a_rx: f64,
    theta_rx: f64,
    a_tx: f64,
    theta_tx: f64,
) -> Result<Complex64, MimoError> {
    if !(a_tx > 0.0) {
        return Err(MimoError::ZeroReferenceAmplitude(a_tx));
    }
    let h = (a_rx / a_tx) * Complex64::from_polar(1.0, theta_rx - theta_tx);
    if !h.re.is_finite() || !h.im.is_finite() {
        return Err(MimoError::NonFiniteEntry);
    }
    Ok(h)
}

impl ChannelMatrix {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(n_rx: usize, n_tx: usize, entries: Vec<Complex64>) -> Result<Self, MimoError> {
        if n_rx == 0 || n_tx == 0 {
            return Err(MimoError::Empty);
        }
        if entries.len() != n_rx * n_tx {
            return Err(MimoError::BadShape {
                rows: n_rx,
                cols: n_tx,
                expected: n_rx * n_tx,
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MimoError::NonFiniteEntry);
        }
        Ok(Self { entries, n_rx, n_tx })
    }

    /// Builds a square matrix from nested row arrays.
    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Self {
        let entries = rows.iter().flatten().copied().collect();
        Self::new(N, N, entries).expect("finite literal entries")
    }

    pub fn zeros(n_rx: usize, n_tx: usize) -> Self {
        Self {
            entries: vec![Complex64::new(0.0, 0.0); n_rx * n_tx],
            n_rx,
            n_tx,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn get(&self, rx: usize, tx: usize) -> Complex64 {
        self.entries[rx * self.n_tx + tx]
    }

    pub(crate) fn set(&mut self, rx: usize, tx: usize, z: Complex64) {
        self.entries[rx * self.n_tx + tx] = z;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> Self {
        let mut out = Self::zeros(self.n_tx, self.n_rx);
        for r in 0..self.n_rx {
            for c in 0..self.n_tx {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, MimoError> {
        if self.n_tx != rhs.n_rx {
            return Err(MimoError::DimensionMismatch {
                lhs: format!("{}x{}", self.n_rx, self.n_tx),
                rhs: format!("{}x{}", rhs.n_rx, rhs.n_tx),
            });
        }
        let mut out = Self::zeros(self.n_rx, rhs.n_tx);
        for r in 0..self.n_rx {
            for c in 0..rhs.n_tx {
                let mut sum = Complex64::new(0.0, 0.0);
                for k in 0..self.n_tx {
                    sum += self.get(r, k) * rhs.get(k, c);
                }
                out.set(r, c, sum);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            entries: self.entries.iter().map(|e| e * z).collect(),
            n_rx: self.n_rx,
            n_tx: self.n_tx,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, MimoError> {
        if self.n_rx != rhs.n_rx || self.n_tx != rhs.n_tx {
            return Err(MimoError::DimensionMismatch {
                lhs: format!("{}x{}", self.n_rx, self.n_tx),
                rhs: format!("{}x{}", rhs.n_rx, rhs.n_tx),
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            entries,
            n_rx: self.n_rx,
            n_tx: self.n_tx,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Determinant via LU with partial pivoting. Square matrices only.
    pub fn det(&self) -> Result<Complex64, MimoError> {
        if self.n_rx != self.n_tx {
            return Err(MimoError::NotSquare);
        }
        let n = self.n_rx;
        let mut a = self.entries.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let mut pivot = col;
            let mut best = a[col * n + col].norm_sqr();
            for row in (col + 1)..n {
                let mag = a[row * n + col].norm_sqr();
                if mag > best {
                    best = mag;
                    pivot = row;
                }
            }
            if best == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for row in (col + 1)..n {
                let factor = a[row * n + col] / p;
                for k in col..n {
                    let sub = factor * a[col * n + k];
                    a[row * n + k] -= sub;
                }
            }
        }
        Ok(det)
    }

    /// Eigenvalues of the Gram matrix `H^H H`, i.e. squared singular values,
    /// in descending order.
    pub fn gram_eigenvalues(&self) -> Result<Vec<f64>, MimoError> {
        let dec = svd(self)?;
        Ok(dec.sigma().iter().map(|s| s * s).collect())
    }

    /// Number of singular values above `tol` relative to the largest.
    pub fn rank(&self, tol: f64) -> Result<usize, MimoError> {
        if !(tol > 0.0) {
            return Err(MimoError::NonPositiveTolerance(tol));
        }
        let dec = svd(self)?;
        let sigma = dec.sigma();
        let max = sigma.first().copied().unwrap_or(0.0);
        if max == 0.0 {
            return Ok(0);
        }
        Ok(sigma.iter().filter(|&&s| s > tol * max).count())
    }

    /// Ratio of the largest to smallest Gram eigenvalue as a power ratio in
    /// dB, `10*log10(lambda_max / lambda_min)`. A rank-deficient matrix has
    /// no finite condition number and reports [`ConditionNumber::Infinite`].
    pub fn condition_number_db(&self) -> Result<ConditionNumber, MimoError> {
        let eig = self.gram_eigenvalues()?;
        let max = eig.first().copied().unwrap_or(0.0);
        let min = eig.last().copied().unwrap_or(0.0);
        if min <= 0.0 || max <= 0.0 {
            return Ok(ConditionNumber::Infinite);
        }
        Ok(ConditionNumber::Db(10.0 * (max / min).log10()))
    }
}

/// Condition number of a channel matrix in dB, or the rank-deficient
/// sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionNumber {
    Db(f64),
    Infinite,
}

impl ConditionNumber {
    /// Finite value in dB, if any.
    pub fn db(self) -> Option<f64> {
        match self {
            ConditionNumber::Db(v) => Some(v),
            ConditionNumber::Infinite => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Channel matrix printed for subject 1 in the feasibility experiment.
    pub(crate) fn example_matrix() -> ChannelMatrix {
        ChannelMatrix::from_rows([
            [c(0.0541, 0.0712), c(-0.0151, -0.0369)],
            [c(0.0473, -0.0153), c(0.0253, 0.0529)],
        ])
    }

    #[test]
    fn channel_response_identity_case() {
        let h = channel_response(1.0, 0.0, 1.0, 0.0).unwrap();
        assert!((h - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn channel_response_quarter_turn() {
        let h = channel_response(2.0, std::f64::consts::FRAC_PI_2, 4.0, 0.0).unwrap();
        assert!((h - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn channel_response_round_trips_printed_entry() {
        // Reverse-solve tone measurements from the printed h11 and check the
        // response comes back.
        let h11 = c(0.0541, 0.0712);
        let a_tx = 2.0;
        let theta_tx = 0.3;
        let a_rx = h11.norm() * a_tx;
        let theta_rx = h11.arg() + theta_tx;
        let back = channel_response(a_rx, theta_rx, a_tx, theta_tx).unwrap();
        assert!((back - h11).norm() < 1e-12);
    }

    #[test]
    fn channel_response_rejects_zero_reference() {
        assert!(matches!(
            channel_response(1.0, 0.0, 0.0, 0.0),
            Err(MimoError::ZeroReferenceAmplitude(_))
        ));
    }

    #[test]
    fn constructor_rejects_non_finite() {
        let err = ChannelMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).unwrap_err();
        assert_eq!(err, MimoError::NonFiniteEntry);
    }

    #[test]
    fn gram_eigenvalues_match_printed_values() {
        let eig = example_matrix().gram_eigenvalues().unwrap();
        assert_eq!(eig.len(), 2);
        assert!((eig[0] - 0.0123).abs() < 5e-4, "lambda1 = {}", eig[0]);
        assert!((eig[1] - 0.0032).abs() < 5e-4, "lambda2 = {}", eig[1]);
    }

    #[test]
    fn gram_eigenvalues_identity() {
        let eig = ChannelMatrix::identity(2).gram_eigenvalues().unwrap();
        assert!((eig[0] - 1.0).abs() < 1e-12);
        assert!((eig[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gram_eigenvalues_rank_one() {
        // Gram matrix of the all-ones 2x2 is [[2,2],[2,2]] with eigenvalues
        // (4, 0) by hand eigendecomposition.
        let h = ChannelMatrix::from_rows([[c(1.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(1.0, 0.0)]]);
        let eig = h.gram_eigenvalues().unwrap();
        assert!((eig[0] - 4.0).abs() < 1e-10);
        assert!(eig[1].abs() < 1e-10);
    }

    #[test]
    fn condition_number_conventions() {
        let cond = example_matrix().condition_number_db().unwrap().db().unwrap();
        // Printed eigenvalue ratio 0.0123/0.0032 = 3.844 gives 5.85 dB as a
        // power ratio; the field-report figure 11.67 dB is the same ratio on
        // a 20*log10 scale.
        assert!((cond - 5.85).abs() < 0.05, "cond = {cond}");
        assert!((2.0 * cond - 11.67).abs() < 0.05);
    }

    #[test]
    fn condition_number_identity_and_diag() {
        assert!(ChannelMatrix::identity(2)
            .condition_number_db()
            .unwrap()
            .db()
            .unwrap()
            .abs()
            < 1e-9);
        let h = ChannelMatrix::from_rows([[c(10.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
        let cond = h.condition_number_db().unwrap().db().unwrap();
        assert!((cond - 20.0).abs() < 1e-9);
    }

    #[test]
    fn condition_number_rank_deficient_is_infinite() {
        let h = ChannelMatrix::from_rows([[c(1.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(1.0, 0.0)]]);
        assert_eq!(h.condition_number_db().unwrap(), ConditionNumber::Infinite);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(example_matrix().rank(1e-6).unwrap(), 2);
        let ones =
            ChannelMatrix::from_rows([[c(1.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(1.0, 0.0)]]);
        assert_eq!(ones.rank(1e-6).unwrap(), 1);
        assert_eq!(ChannelMatrix::zeros(2, 2).rank(1e-6).unwrap(), 0);
    }

    #[test]
    fn det_of_printed_matrix_matches_eigenvalue_product() {
        let h = example_matrix();
        let det = h.det().unwrap();
        let eig = h.gram_eigenvalues().unwrap();
        let prod: f64 = eig.iter().product();
        let rel = (prod - det.norm_sqr()).abs() / det.norm_sqr();
        assert!(rel < 1e-10, "rel = {rel}");
    }
}
