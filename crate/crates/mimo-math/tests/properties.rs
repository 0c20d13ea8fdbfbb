//! Randomized property suite for the SVD and capacity math.

use mimo_math::{
    effective_capacity, effective_channel, precoding_pair, svd, ChannelMatrix, Complex64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, n_rx: usize, n_tx: usize, scale: f64) -> ChannelMatrix {
    let entries = (0..n_rx * n_tx)
        .map(|_| Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
        .collect();
    ChannelMatrix::new(n_rx, n_tx, entries).unwrap()
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
fn svd_reconstruction_and_unitarity_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..1000 {
        let n_rx = rng.gen_range(1..=4);
        let n_tx = rng.gen_range(1..=4);
        let scale = if trial % 7 == 0 { 1e-4 } else { 1.0 };
        let h = random_matrix(&mut rng, n_rx, n_tx, scale);
        let dec = svd(&h).unwrap();
        let norm = h.frobenius_norm();
        if norm > 0.0 {
            let err = dec.reconstruct().sub(&h).unwrap().frobenius_norm() / norm;
            assert!(err < 1e-10, "trial {trial}: reconstruction err {err}");
        }
        assert!(unitarity_defect(dec.u()) < 1e-10, "trial {trial}: U");
        assert!(unitarity_defect(dec.v()) < 1e-10, "trial {trial}: V");
        for w in dec.sigma().windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(dec.sigma().iter().all(|&s| s >= 0.0));
    }
}

#[test]
fn oracle_effective_channel_is_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let h = random_matrix(&mut rng, 2, 2, 1.0);
        let pair = precoding_pair(&svd(&h).unwrap());
        let phi = effective_channel(&pair, &h).unwrap();
        assert!(phi.phi().get(0, 1).norm() < 1e-10);
        assert!(phi.phi().get(1, 0).norm() < 1e-10);
    }
}

#[test]
fn perfect_csi_dominates_mismatched_estimates() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for trial in 0..1000 {
        let h = random_matrix(&mut rng, 2, 2, 1.0);
        let perturbation = rng.gen_range(0.01..0.8);
        let noise = random_matrix(&mut rng, 2, 2, perturbation);
        let h_est = ChannelMatrix::new(
            2,
            2,
            h.entries()
                .iter()
                .zip(noise.entries())
                .map(|(a, b)| a + b)
                .collect(),
        )
        .unwrap();
        for snr in [1.0, 10.0, 100.0] {
            let oracle = effective_capacity(&h, &h, snr, 2).unwrap();
            let mismatched = effective_capacity(&h, &h_est, snr, 2).unwrap();
            assert!(
                oracle >= mismatched - 1e-9,
                "trial {trial} snr {snr}: {oracle} < {mismatched}"
            );
        }
    }
}

#[test]
fn capacity_monotone_in_snr() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..300 {
        let h = random_matrix(&mut rng, 2, 2, 1.0);
        let h_est = random_matrix(&mut rng, 2, 2, 1.0);
        let mut prev = 0.0;
        for snr in [0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 200.0] {
            let cap = effective_capacity(&h, &h_est, snr, 2).unwrap();
            assert!(cap >= prev - 1e-12, "snr {snr}: {cap} < {prev}");
            prev = cap;
        }
    }
}

#[test]
fn gram_eigenvalue_product_equals_det_squared() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..500 {
        let n = rng.gen_range(2..=3);
        let h = random_matrix(&mut rng, n, n, 1.0);
        let det_sq = h.det().unwrap().norm_sqr();
        let prod: f64 = h.gram_eigenvalues().unwrap().iter().product();
        if det_sq > 1e-12 {
            assert!((prod - det_sq).abs() / det_sq < 1e-10);
        }
    }
}

#[test]
fn global_phase_leaves_diagnostics_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..300 {
        let h = random_matrix(&mut rng, 2, 2, 1.0);
        let phase = Complex64::from_polar(1.0, rng.gen_range(-3.0..3.0));
        let h2 = h.scale(phase);
        let e1 = h.gram_eigenvalues().unwrap();
        let e2 = h2.gram_eigenvalues().unwrap();
        for (a, b) in e1.iter().zip(&e2) {
            assert!((a - b).abs() <= 1e-10 * a.max(1.0));
        }
        assert_eq!(h.rank(1e-6).unwrap(), h2.rank(1e-6).unwrap());
        let c1 = h.condition_number_db().unwrap().db();
        let c2 = h2.condition_number_db().unwrap().db();
        match (c1, c2) {
            (Some(a), Some(b)) => assert!((a - b).abs() < 1e-8),
            (None, None) => {}
            _ => panic!("condition number variant changed under global phase"),
        }
        let snr = 10.0;
        let cap1 = effective_capacity(&h, &h, snr, 2).unwrap();
        let cap2 = effective_capacity(&h2, &h2, snr, 2).unwrap();
        assert!((cap1 - cap2).abs() < 1e-10);
    }
}
