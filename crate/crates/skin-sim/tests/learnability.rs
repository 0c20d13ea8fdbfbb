//! Floor check that the IMU actually carries the channel state: a plain
//! ridge regression from per-window IMU tone amplitudes to the true channel
//! amplitude must explain a solid share of the variance, otherwise the
//! downstream learning task would be degenerate.

use signal_core::estimate_tone;
use skin_sim::{simulate, SimScenario};

/// Solves (X^T X + lambda I) w = X^T y by Gaussian elimination.
fn ridge_fit(xs: &[Vec<f64>], ys: &[f64], lambda: f64) -> Vec<f64> {
    let d = xs[0].len();
    let mut a = vec![vec![0.0; d + 1]; d];
    for (x, &y) in xs.iter().zip(ys) {
        for i in 0..d {
            for j in 0..d {
                a[i][j] += x[i] * x[j];
            }
            a[i][d] += x[i] * y;
        }
    }
    for i in 0..d {
        a[i][i] += lambda;
    }
    for col in 0..d {
        let piv = (col..d).max_by(|&r1, &r2| a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap()).unwrap();
        a.swap(col, piv);
        let p = a[col][col];
        for j in col..=d {
            a[col][j] /= p;
        }
        for r in 0..d {
            if r != col {
                let f = a[r][col];
                for j in col..=d {
                    a[r][j] -= f * a[col][j];
                }
            }
        }
    }
    (0..d).map(|i| a[i][d]).collect()
}

#[test]
fn ridge_regression_from_imu_features_explains_amplitude() {
    let mut sc = SimScenario::default_scenario();
    sc.duration = 40.0;
    let out = simulate(&sc).unwrap();
    let carrier = 90.0;
    let n_windows = out.truth.n_windows();

    // Features: per-axis tone amplitude at the pilot carrier (plus bias),
    // straight from the raw IMU window.
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let axes: Vec<_> = (0..6).map(|a| out.imu.axis_waveform(a)).collect();
    for w in 2..n_windows {
        let start = w * sc.hop;
        let mut feat = vec![1.0];
        for axis in &axes {
            feat.push(estimate_tone(axis, carrier, start, sc.window).unwrap().amplitude);
        }
        xs.push(feat);
        ys.push(out.truth.gain(w, carrier, 1, 1).unwrap().norm());
    }
    let n_train = xs.len() * 7 / 10;
    let w = ridge_fit(&xs[..n_train], &ys[..n_train], 1e-6);

    let test_x = &xs[n_train..];
    let test_y = &ys[n_train..];
    let mean_y = test_y.iter().sum::<f64>() / test_y.len() as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (x, &y) in test_x.iter().zip(test_y) {
        let pred: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum();
        ss_res += (y - pred).powi(2);
        ss_tot += (y - mean_y).powi(2);
    }
    let r2 = 1.0 - ss_res / ss_tot;
    println!("ridge R^2 = {r2}");
    assert!(r2 > 0.3, "ridge R^2 = {r2}");
}
