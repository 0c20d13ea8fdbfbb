//! Development probe: measured pipeline coherence as a function of the
//! latent correlation time, for the canonical 60 s / 20 seed measurement.

use skin_sim::{measure_gain_coherence_with_tau, SimScenario};

fn main() {
    let taus = [0.55, 0.65, 0.72, 0.80, 0.90];
    for &tau in &taus {
        let mut total = 0.0;
        let mut count = 0;
        for base in [4000u64, 9000, 14000] {
            for s in 0..20 {
                let mut sc = SimScenario::default_scenario();
                sc.duration = 60.0;
                sc.seed = base + s;
                let out = measure_gain_coherence_with_tau(&sc, 0.8, tau).unwrap();
                total += out.coherence_time().unwrap();
                count += 1;
            }
        }
        println!("tau {:>6.3} -> measured {:>7.4}", tau, total / count as f64);
    }
}
