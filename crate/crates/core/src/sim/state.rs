//! Per-link queue and age state.

/// Measurement counters of one link. Only slots in the measurement phase
/// are counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinkCounters {
    /// Transmissions attempted. Always equal to `active_slots`.
    pub attempts: u64,
    pub successes: u64,
    pub active_slots: u64,
    /// Slots in which the buffer held a packet when the access decision
    /// was made.
    pub busy_slots: u64,
    pub age_sum: u64,
    pub measured_slots: u64,
}

/// State of one link's unit LCFS-with-replacement buffer and AoI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkState {
    /// Generation slot of the buffered packet.
    pub buffer: Option<u64>,
    /// Current age at the receiver, slots.
    pub age: u64,
    pub counters: LinkCounters,
}

impl Default for LinkState {
    fn default() -> Self {
        Self {
            buffer: None,
            age: 1,
            counters: LinkCounters::default(),
        }
    }
}

impl LinkState {
    /// Fraction of measured slots in which the link transmitted.
    pub fn empirical_active_fraction(&self) -> Option<f64> {
        let c = &self.counters;
        (c.measured_slots > 0).then(|| c.active_slots as f64 / c.measured_slots as f64)
    }

    /// Fraction of attempts that were decoded; `None` before the first
    /// attempt.
    pub fn empirical_success_prob(&self) -> Option<f64> {
        let c = &self.counters;
        (c.attempts > 0).then(|| c.successes as f64 / c.attempts as f64)
    }

    /// Fraction of measured slots that found the buffer non-empty.
    pub fn busy_fraction(&self) -> Option<f64> {
        let c = &self.counters;
        (c.measured_slots > 0).then(|| c.busy_slots as f64 / c.measured_slots as f64)
    }

    /// Time-average age over the measured slots.
    pub fn avg_aoi(&self) -> Option<f64> {
        let c = &self.counters;
        (c.measured_slots > 0).then(|| c.age_sum as f64 / c.measured_slots as f64)
    }
}

/// What happened on one link in one slot. Recorded only when tracing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotEvent {
    pub slot: u64,
    pub arrived: bool,
    /// Generation slot of the buffered packet after the arrival phase.
    pub buffered: Option<u64>,
    pub active: bool,
    pub delivered: bool,
    /// Age after the slot's update.
    pub age: u64,
}
