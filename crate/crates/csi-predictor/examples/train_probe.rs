//! End-to-end training probe: generate the default scenario, train a few
//! representative slots, report TPR/RMSE and wall time.

use std::time::Instant;

use csi_predictor::{build_slot_dataset, train_holdout, SlotSpec, TargetKind, TrainConfig};
use skin_sim::{simulate, SensorSet, SimScenario};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let duration: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(120.0);
    let epochs: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(15);
    let lr: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1e-3);
    let max_slots: usize = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(6);

    let mut sc = SimScenario::default_scenario();
    sc.duration = duration;
    let t0 = Instant::now();
    let out = simulate(&sc).unwrap();
    println!("simulate: {:.1?}", t0.elapsed());

    let specs = [
        (90.0, 1, TargetKind::Amplitude, SensorSet::Gyro),
        (90.0, 1, TargetKind::Phase, SensorSet::Gyro),
        (120.0, 2, TargetKind::Amplitude, SensorSet::Gyro),
        (120.0, 2, TargetKind::Phase, SensorSet::Gyro),
        (90.0, 1, TargetKind::Amplitude, SensorSet::Acc),
        (90.0, 1, TargetKind::Phase, SensorSet::Acc),
    ];
    for (carrier, rx, target, sensor) in specs.into_iter().take(max_slots) {
        let spec = SlotSpec {
            carrier_hz: carrier,
            rx,
            target,
            sensor,
        };
        let t1 = Instant::now();
        let ds = build_slot_dataset(&out.imu, &out.truth, &sc, &spec, 16, 32).unwrap();
        let prep = t1.elapsed();
        let cfg = TrainConfig {
            epochs,
            learning_rate: lr,
            seed: 5,
            ..TrainConfig::default()
        };
        let t2 = Instant::now();
        let trained = train_holdout(&ds, &cfg).unwrap();
        println!(
            "{:>5} Hz rx{} {:<9} {:<5}: windows {:>4}  TPR {:.3}  RMSE {:.4}  (prep {:.1?}, train {:.1?})",
            carrier,
            rx,
            target.label(),
            sensor.label(),
            ds.blocks.len(),
            trained.report.tpr,
            trained.report.rmse,
            prep,
            t2.elapsed()
        );
    }
}
