use num_complex::Complex64;

use crate::error::MimoError;
use crate::matrix::ChannelMatrix;

const MAX_SWEEPS: usize = 64;
const ORTHO_TOL: f64 = 1e-15;

/// Full singular value decomposition `H = U * diag(sigma) * V^H` with square
/// unitary `U` (n_rx x n_rx) and `V` (n_tx x n_tx) and singular values in
/// descending order.
#[derive(Debug, Clone)]
pub struct SvdDecomposition {
    u: ChannelMatrix,
    sigma: Vec<f64>,
    v: ChannelMatrix,
}

impl SvdDecomposition {
    pub fn u(&self) -> &ChannelMatrix {
        &self.u
    }

    /// Singular values, descending and non-negative; `min(n_rx, n_tx)` of them.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn v(&self) -> &ChannelMatrix {
        &self.v
    }

    /// Recomposes `U * diag(sigma) * V^H`.
    pub fn reconstruct(&self) -> ChannelMatrix {
        let m = self.u.n_rx();
        let n = self.v.n_rx();
        let mut scaled = ChannelMatrix::zeros(m, n);
        for r in 0..m {
            for (k, s) in self.sigma.iter().enumerate() {
                scaled.set(r, k, self.u.get(r, k) * s);
            }
        }
        scaled.mul(&self.v.hermitian()).expect("shapes agree")
    }
}

/// One-sided Jacobi SVD.
///
/// Columns of a working copy are repeatedly orthogonalized by complex plane
/// rotations accumulated into `V`; at convergence the column norms are the
/// singular values and the normalized columns form the range part of `U`,
/// which is then completed to a full unitary basis (handles rank-deficient
/// and rectangular inputs). Jacobi keeps relative accuracy on these small
/// matrices well below the 1e-10 reconstruction tolerance used by callers.
pub fn svd(h: &ChannelMatrix) -> Result<SvdDecomposition, MimoError> {
    if h.n_rx() < h.n_tx() {
        let t = svd(&h.hermitian())?;
        return Ok(SvdDecomposition {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    let m = h.n_rx();
    let n = h.n_tx();

    // Column-major working copy.
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|c| (0..m).map(|r| h.get(r, c)).collect())
        .collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|c| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[c] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::new(0.0, 0.0);
                for r in 0..m {
                    alpha += cols[p][r].norm_sqr();
                    beta += cols[q][r].norm_sqr();
                    gamma += cols[p][r].conj() * cols[q][r];
                }
                let g = gamma.norm();
                if g <= ORTHO_TOL * (alpha * beta).sqrt() || alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let tau = (beta - alpha) / (2.0 * g);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // new_p = c*a_p - s*conj(phase)*a_q ; new_q = s*phase*a_p + c*a_q
                let sp = s * phase;
                let spc = s * phase.conj();
                for r in 0..m {
                    let ap = cols[p][r];
                    let aq = cols[q][r];
                    cols[p][r] = c * ap - spc * aq;
                    cols[q][r] = sp * ap + c * aq;
                }
                for r in 0..n {
                    let vp = v[p][r];
                    let vq = v[q][r];
                    v[p][r] = c * vp - spc * vq;
                    v[q][r] = sp * vp + c * vq;
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(MimoError::SvdNoConvergence);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());

    let sigma: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let null_tol = sigma_max * 1e-13;

    // U columns: normalized data columns for significant sigma, basis
    // completion for the null space and the extra m-n directions.
    let mut u_cols: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    for (k, &i) in order.iter().enumerate() {
        if sigma[k] > null_tol && sigma[k] > 0.0 {
            u_cols.push(cols[i].iter().map(|z| z / sigma[k]).collect());
        } else {
            u_cols.push(vec![Complex64::new(0.0, 0.0); m]); // fill below
        }
    }
    for _ in n..m {
        u_cols.push(vec![Complex64::new(0.0, 0.0); m]);
    }
    complete_basis(&mut u_cols, null_tol.max(1e-300));

    let mut u = ChannelMatrix::zeros(m, m);
    for (cix, col) in u_cols.iter().enumerate() {
        for (r, z) in col.iter().enumerate() {
            u.set(r, cix, *z);
        }
    }
    let mut v_mat = ChannelMatrix::zeros(n, n);
    for (cix, &i) in order.iter().enumerate() {
        for r in 0..n {
            v_mat.set(r, cix, v[i][r]);
        }
    }

    Ok(SvdDecomposition {
        u,
        sigma,
        v: v_mat,
    })
}

/// Replaces (near-)zero columns with unit vectors orthogonal to all other
/// columns, using twice-through modified Gram-Schmidt over canonical seeds.
fn complete_basis(cols: &mut [Vec<Complex64>], zero_tol: f64) {
    let m = cols[0].len();
    let needs: Vec<usize> = cols
        .iter()
        .enumerate()
        .filter(|(_, c)| norm(c) <= zero_tol)
        .map(|(i, _)| i)
        .collect();
    let mut seed = 0usize;
    for idx in needs {
        loop {
            assert!(seed < m + 1, "basis completion ran out of seeds");
            let mut cand = vec![Complex64::new(0.0, 0.0); m];
            cand[seed % m] = Complex64::new(1.0, 0.0);
            seed += 1;
            for _ in 0..2 {
                for (j, other) in cols.iter().enumerate() {
                    if j == idx || norm(other) <= zero_tol {
                        continue;
                    }
                    let proj: Complex64 = other
                        .iter()
                        .zip(cand.iter())
                        .map(|(o, c)| o.conj() * c)
                        .sum();
                    for (c, o) in cand.iter_mut().zip(other.iter()) {
                        *c -= proj * o;
                    }
                }
            }
            let nrm = norm(&cand);
            if nrm > 1e-6 {
                for c in cand.iter_mut() {
                    *c /= nrm;
                }
                cols[idx] = cand;
                break;
            }
        }
    }
}

fn norm(col: &[Complex64]) -> f64 {
    col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unitarity_defect(m: &ChannelMatrix) -> f64 {
        let n = m.n_tx();
        m.hermitian()
            .mul(m)
            .unwrap()
            .sub(&ChannelMatrix::identity(n))
            .unwrap()
            .frobenius_norm()
    }

    #[test]
    fn identity_decomposes_trivially() {
        let dec = svd(&ChannelMatrix::identity(2)).unwrap();
        assert!((dec.sigma()[0] - 1.0).abs() < 1e-12);
        assert!((dec.sigma()[1] - 1.0).abs() < 1e-12);
        let recon = dec.reconstruct();
        assert!(
            recon
                .sub(&ChannelMatrix::identity(2))
                .unwrap()
                .frobenius_norm()
                < 1e-12
        );
    }

    #[test]
    fn diagonal_sorts_descending() {
        let h = ChannelMatrix::from_rows([[c(3.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(4.0, 0.0)]]);
        let dec = svd(&h).unwrap();
        assert!((dec.sigma()[0] - 4.0).abs() < 1e-12);
        assert!((dec.sigma()[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn printed_matrix_eigenvalue_product_matches_det() {
        // Hand-computed determinant of the printed feasibility matrix:
        // h11*h22 = -0.00239775 + 0.00466325i, h12*h21 = -0.0012788 - 0.00151434i,
        // det = -0.00111895 + 0.00617759i, |det|^2 = 3.94147e-5.
        let h = ChannelMatrix::from_rows([
            [c(0.0541, 0.0712), c(-0.0151, -0.0369)],
            [c(0.0473, -0.0153), c(0.0253, 0.0529)],
        ]);
        let det_sq_by_hand = 3.94147e-5;
        let dec = svd(&h).unwrap();
        let prod = dec.sigma()[0].powi(2) * dec.sigma()[1].powi(2);
        assert!((prod - det_sq_by_hand).abs() / det_sq_by_hand < 1e-4);
        // And the paper's rounded eigenvalue product is consistent too.
        assert!((prod - 0.0032 * 0.0123).abs() < 2e-7);
    }

    #[test]
    fn zero_matrix_has_zero_sigma_and_unitary_factors() {
        let dec = svd(&ChannelMatrix::zeros(3, 2)).unwrap();
        assert!(dec.sigma().iter().all(|&s| s == 0.0));
        assert!(unitarity_defect(dec.u()) < 1e-12);
        assert!(unitarity_defect(dec.v()) < 1e-12);
    }

    #[test]
    fn wide_matrix_reconstructs() {
        let h = ChannelMatrix::new(
            2,
            3,
            vec![
                c(1.0, 0.5),
                c(-0.3, 0.2),
                c(0.0, -1.0),
                c(0.7, 0.0),
                c(0.1, 0.1),
                c(-0.4, 0.9),
            ],
        )
        .unwrap();
        let dec = svd(&h).unwrap();
        let err = dec.reconstruct().sub(&h).unwrap().frobenius_norm() / h.frobenius_norm();
        assert!(err < 1e-12, "err = {err}");
        assert!(dec.u().n_rx() == 2 && dec.u().n_tx() == 2);
        assert!(dec.v().n_rx() == 3 && dec.v().n_tx() == 3);
        assert!(unitarity_defect(dec.u()) < 1e-12);
        assert!(unitarity_defect(dec.v()) < 1e-12);
    }
}
