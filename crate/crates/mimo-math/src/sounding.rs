use crate::error::MimoError;

/// Time budget of one sounding exchange inside a coherence window, all in
/// seconds. `t_feedback` is rarely known for a concrete link and defaults
/// to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoundingBudget {
    pub t_ramp: f64,
    pub t_ring: f64,
    pub t_sound: f64,
    pub t_feedback: f64,
    pub t_coherence: f64,
}

/// How the per-window overhead is accounted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverheadModel {
    /// Both ramp-ups of a half-duplex turnaround plus ringing plus the
    /// sounding packet and feedback: `2*t_ramp + t_ring + t_sound + t_feedback`.
    Full,
    /// Single ramp plus sounding-packet length, the coarser accounting used
    /// for sounding-packet MIMO comparisons: `t_ramp + t_sound`.
    Simplified,
}

impl SoundingBudget {
    pub fn new(
        t_ramp: f64,
        t_ring: f64,
        t_sound: f64,
        t_feedback: f64,
        t_coherence: f64,
    ) -> Result<Self, MimoError> {
        let times = [t_ramp, t_ring, t_sound, t_feedback];
        if times.iter().any(|t| !t.is_finite() || *t < 0.0) || !(t_coherence > 0.0) {
            return Err(MimoError::InvalidBudget);
        }
        Ok(Self {
            t_ramp,
            t_ring,
            t_sound,
            t_feedback,
            t_coherence,
        })
    }

    pub fn overhead(&self, model: OverheadModel) -> f64 {
        match model {
            OverheadModel::Full => 2.0 * self.t_ramp + self.t_ring + self.t_sound + self.t_feedback,
            OverheadModel::Simplified => self.t_ramp + self.t_sound,
        }
    }

    /// Fraction of the coherence window left for data after the sounding
    /// exchange, clamped to `[0, 1]`. Zero means sounding cannot complete
    /// before the channel goes stale.
    pub fn data_time_fraction(&self, model: OverheadModel) -> f64 {
        ((self.t_coherence - self.overhead(model)) / self.t_coherence).max(0.0)
    }
}
