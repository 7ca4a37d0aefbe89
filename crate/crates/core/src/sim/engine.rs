//! The slot loop.

use rand::Rng;
use rand_distr::{Bernoulli, Distribution, Exp1};

use crate::config::ValidatedConfig;
use crate::rng::RunStreams;
use crate::sim::interference::{Decided, InterferenceMap};
use crate::sim::state::{LinkState, SlotEvent};
use crate::topology::{sample_topology, Topology};

/// How a transmission outcome is decided.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    /// Rayleigh fading, decided from the exact conditional success
    /// probability of each active link with one uniform draw per link.
    Rayleigh,
    /// Rayleigh fading with an explicit unit-mean exponential gain drawn for
    /// every active transmitter and receiver pair. Quadratic in the number
    /// of active links; meant for cross-checking.
    RayleighExplicit,
    /// Test hook: every gain fixed to the given value.
    FixedFades(f64),
    /// Test hook: every attempt succeeds independently with this
    /// probability, regardless of geometry.
    ForcedSuccess(f64),
}

/// How many success tests each stage of the interference cascade settled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CascadeStats {
    pub near: u64,
    pub mid: u64,
    pub far: u64,
}

/// One realization being simulated.
pub struct Simulator {
    cfg: ValidatedConfig,
    topo: Topology,
    channel: Channel,
    map: Option<InterferenceMap>,
    states: Vec<LinkState>,
    streams: RunStreams,
    arrival: Option<Bernoulli>,
    access: Option<Bernoulli>,
    forced: Option<Bernoulli>,
    active: Vec<bool>,
    active_list: Vec<u32>,
    delivered: Vec<bool>,
    trace: Option<Vec<Vec<SlotEvent>>>,
    stats: CascadeStats,
}

/// `None` when the event is certain, so no draw is spent on it.
fn coin(p: f64) -> Option<Bernoulli> {
    (p < 1.0).then(|| Bernoulli::new(p).expect("probability in [0,1]"))
}

impl Simulator {
    pub fn new(cfg: &ValidatedConfig, topo: Topology, streams: RunStreams, channel: Channel) -> Self {
        let map = matches!(channel, Channel::Rayleigh).then(|| InterferenceMap::new(cfg, &topo));
        let forced = match channel {
            Channel::ForcedSuccess(q) => Some(Bernoulli::new(q.clamp(0.0, 1.0)).expect("probability in [0,1]")),
            _ => None,
        };
        let n = topo.len();
        Self {
            arrival: coin(cfg.cfg().xi),
            access: coin(cfg.cfg().p),
            forced,
            cfg: cfg.clone(),
            map,
            channel,
            states: vec![LinkState::default(); n],
            streams,
            active: vec![false; n],
            active_list: Vec::with_capacity(n),
            delivered: vec![false; n],
            trace: None,
            stats: CascadeStats::default(),
            topo,
        }
    }

    /// Samples the topology of realization `run` from the config's seed.
    pub fn for_run(cfg: &ValidatedConfig, run: u64, channel: Channel) -> Self {
        let mut streams = RunStreams::new(cfg.cfg().seed, run);
        let topo = sample_topology(cfg, &mut streams.topology);
        Self::new(cfg, topo, streams, channel)
    }

    /// Records a [`SlotEvent`] per link per slot from now on.
    pub fn with_trace(mut self) -> Self {
        self.trace = Some(vec![Vec::new(); self.topo.len()]);
        self
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn states(&self) -> &[LinkState] {
        &self.states
    }

    pub fn trace(&self) -> Option<&[Vec<SlotEvent>]> {
        self.trace.as_deref()
    }

    pub fn cascade_stats(&self) -> CascadeStats {
        self.stats
    }

    /// Runs the configured warm-up and measurement phases.
    pub fn run(&mut self) {
        let c = self.cfg.cfg();
        let (warm, meas) = (c.warmup_slots, c.measure_slots);
        for t in 0..warm {
            self.step_slot(t, false);
        }
        for t in warm..warm + meas {
            self.step_slot(t, true);
        }
    }

    /// Advances every link by slot `t`: arrivals, access, channel, then the
    /// age update. Counters move only when `measure` is set.
    pub fn step_slot(&mut self, t: u64, measure: bool) {
        let n = self.states.len();
        let mut arrived = vec![false; if self.trace.is_some() { n } else { 0 }];

        for (j, s) in self.states.iter_mut().enumerate() {
            let new = match &self.arrival {
                None => true,
                Some(b) => b.sample(&mut self.streams.arrivals),
            };
            if new {
                s.buffer = Some(t);
                if let Some(a) = arrived.get_mut(j) {
                    *a = true;
                }
            }
        }

        self.active_list.clear();
        for (j, s) in self.states.iter_mut().enumerate() {
            let on = s.buffer.is_some()
                && match &self.access {
                    None => true,
                    Some(b) => b.sample(&mut self.streams.access),
                };
            self.active[j] = on;
            if on {
                self.active_list.push(j as u32);
            }
            if measure {
                s.counters.measured_slots += 1;
                if s.buffer.is_some() {
                    s.counters.busy_slots += 1;
                }
                if on {
                    s.counters.active_slots += 1;
                    s.counters.attempts += 1;
                }
            }
        }

        let mut delivered = std::mem::take(&mut self.delivered);
        delivered.fill(false);
        match self.channel {
            Channel::Rayleigh => {
                let map = self.map.as_ref().expect("map built for Rayleigh");
                for &j in &self.active_list {
                    let u: f64 = self.streams.channel.random();
                    let (ok, stage) = map.decide(j as usize, &self.active, &self.active_list, u.ln());
                    match stage {
                        Decided::Near => self.stats.near += 1,
                        Decided::Mid => self.stats.mid += 1,
                        Decided::Far => self.stats.far += 1,
                    }
                    delivered[j as usize] = ok;
                }
            }
            Channel::RayleighExplicit => {
                for i in 0..self.active_list.len() {
                    let j = self.active_list[i] as usize;
                    delivered[j] = self.sinr_test(j, |rng| Exp1.sample(rng));
                }
            }
            Channel::FixedFades(h) => {
                for i in 0..self.active_list.len() {
                    let j = self.active_list[i] as usize;
                    delivered[j] = self.sinr_test(j, |_| h);
                }
            }
            Channel::ForcedSuccess(_) => {
                let b = self.forced.as_ref().expect("forced coin");
                for &j in &self.active_list {
                    delivered[j as usize] = b.sample(&mut self.streams.channel);
                }
            }
        }

        for (j, s) in self.states.iter_mut().enumerate() {
            let buffered = s.buffer;
            if delivered[j] {
                let generated = s.buffer.take().expect("active link has a packet");
                s.age = t - generated + 1;
            } else {
                s.age += 1;
            }
            if measure {
                s.counters.age_sum += s.age;
                if delivered[j] {
                    s.counters.successes += 1;
                }
            }
            if let Some(trace) = self.trace.as_mut() {
                trace[j].push(SlotEvent {
                    slot: t,
                    arrived: arrived[j],
                    buffered,
                    active: self.active[j],
                    delivered: delivered[j],
                    age: s.age,
                });
            }
        }
        self.delivered = delivered;
    }

    /// Explicit SINR threshold test for link `j` with gains from `gain`.
    fn sinr_test(&mut self, j: usize, mut gain: impl FnMut(&mut rand_chacha::ChaCha8Rng) -> f64) -> bool {
        let c = self.cfg.cfg();
        let rng = &mut self.streams.channel;
        let signal = gain(rng) * c.r.powf(-c.alpha);
        let mut interference = 0.0;
        for &k in &self.active_list {
            let k = k as usize;
            if k != j {
                interference += gain(rng) * self.topo.cross_distance(k, j).powf(-c.alpha);
            }
        }
        signal > c.theta * (interference + 1.0 / self.cfg.rho())
    }
}
