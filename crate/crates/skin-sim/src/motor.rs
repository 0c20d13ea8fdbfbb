use signal_core::Waveform;

/// Time constant margin: first-order rise reaches 99% of the command within
/// `t_ramp` (and decay falls below 1% within `t_ring`) with a little slack.
const SETTLE_LOG: f64 = 4.653_960_350_157_523; // ln(105)

/// First-order motor amplitude dynamics: slow spin-up toward the commanded
/// level and fast-but-not-instant decay after mute.
#[derive(Debug, Clone, Copy)]
pub struct MotorState {
    pub commanded: f64,
    pub effective: f64,
    pub t_ramp: f64,
    pub t_ring: f64,
}

impl MotorState {
    pub fn new(t_ramp: f64, t_ring: f64) -> Self {
        Self {
            commanded: 0.0,
            effective: 0.0,
            t_ramp,
            t_ring,
        }
    }

    pub fn set_command(&mut self, level: f64) {
        self.commanded = level;
    }

    pub fn step(&mut self, dt: f64) {
        let tau = if self.commanded > self.effective {
            self.t_ramp / SETTLE_LOG
        } else {
            self.t_ring / SETTLE_LOG
        };
        if tau <= 0.0 {
            self.effective = self.commanded;
        } else {
            self.effective = self.commanded + (self.effective - self.commanded) * (-dt / tau).exp();
        }
    }
}

/// On/off command schedule as (time, level) steps; level holds until the
/// next event.
#[derive(Debug, Clone, PartialEq)]
pub struct MotorSchedule {
    events: Vec<(f64, f64)>,
}

impl MotorSchedule {
    pub fn always_on() -> Self {
        Self {
            events: vec![(0.0, 1.0)],
        }
    }

    pub fn always_off() -> Self {
        Self { events: vec![] }
    }

    pub fn from_events(mut events: Vec<(f64, f64)>) -> Self {
        events.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Self { events }
    }

    pub fn command_at(&self, t: f64) -> f64 {
        let mut level = 0.0;
        for &(at, l) in &self.events {
            if at <= t {
                level = l;
            } else {
                break;
            }
        }
        level
    }
}

/// Effective motor amplitude over time for a command schedule.
pub fn motor_envelope(
    schedule: &MotorSchedule,
    t_ramp: f64,
    t_ring: f64,
    duration: f64,
    sample_rate: f64,
) -> Waveform {
    let n = (duration * sample_rate).round() as usize;
    let dt = 1.0 / sample_rate;
    let mut state = MotorState::new(t_ramp, t_ring);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        state.set_command(schedule.command_at(k as f64 * dt));
        if k > 0 {
            state.step(dt);
        } else {
            state.effective = if state.t_ramp <= 0.0 { state.commanded } else { 0.0 };
        }
        out.push(state.effective);
    }
    Waveform::new(out, sample_rate).expect("finite envelope")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_reaches_99_percent_at_t_ramp() {
        let env = motor_envelope(&MotorSchedule::always_on(), 0.030, 0.010, 0.1, 1000.0);
        let at = |t: f64| env.samples()[(t * 1000.0).round() as usize];
        assert!(at(0.025) < 0.99, "25 ms: {}", at(0.025));
        assert!(at(0.030) >= 0.99, "30 ms: {}", at(0.030));
        assert!(env.samples().iter().all(|&e| (0.0..=1.0).contains(&e)));
    }

    #[test]
    fn ring_decays_to_one_percent_at_t_ring() {
        let sched = MotorSchedule::from_events(vec![(0.0, 1.0), (0.2, 0.0)]);
        let env = motor_envelope(&sched, 0.030, 0.010, 0.3, 1000.0);
        let at = |t: f64| env.samples()[(t * 1000.0).round() as usize];
        assert!(at(0.199) > 0.99);
        assert!(at(0.210) <= 0.01, "210 ms: {}", at(0.210));
    }

    #[test]
    fn always_off_is_all_zero() {
        let env = motor_envelope(&MotorSchedule::always_off(), 0.030, 0.010, 0.1, 300.0);
        assert!(env.samples().iter().all(|&e| e == 0.0));
    }
}
