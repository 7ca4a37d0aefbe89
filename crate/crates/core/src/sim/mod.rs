//! Slotted Monte Carlo simulation of the network.
//!
//! Each realization samples a topology, runs `warmup_slots` discarded slots
//! and then `measure_slots` measured ones. Realizations are independent and
//! are spread over the thread pool when the `parallel` feature is on; the
//! report is assembled in realization order either way.

pub mod engine;
pub mod interference;
pub mod state;

use thiserror::Error;

use crate::config::ValidatedConfig;
use crate::par;
use crate::rng::RunStreams;
use crate::topology::Topology;

pub use engine::{CascadeStats, Channel, Simulator};
pub use state::{LinkCounters, LinkState, SlotEvent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("topology_count must be at least 1")]
    NoTopologies,
    #[error("measure_slots must be at least 1")]
    NoMeasuredSlots,
}

/// Time-averaged statistics of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSummary {
    /// Realization the link belongs to.
    pub topology: usize,
    pub avg_aoi: f64,
    /// `None` if the link never transmitted while measured.
    pub emp_success_prob: Option<f64>,
    pub emp_active_prob: f64,
    pub busy_fraction: f64,
    pub counters: LinkCounters,
}

/// Aggregate of one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopologySummary {
    pub links: usize,
    pub aoi_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub per_link: Vec<LinkSummary>,
    pub per_topology: Vec<TopologySummary>,
    /// Mean of the per-link average AoI over every link of every realization.
    pub network_avg_aoi: f64,
    /// Standard error of `network_avg_aoi`, clustered by realization (per
    /// link when there is a single realization).
    pub network_avg_aoi_stderr: f64,
    /// Measured slots per realization.
    pub slots_simulated: u64,
    pub topology_count: usize,
    /// Realizations that contained no link.
    pub empty_topologies: usize,
    pub cascade: CascadeStats,
}

impl SimReport {
    /// Folds finished realizations, in order, into a report.
    pub fn from_runs(runs: &[Simulator], slots: u64) -> Self {
        let mut per_link = Vec::new();
        let mut per_topology = Vec::with_capacity(runs.len());
        let mut cascade = CascadeStats::default();
        for (t, sim) in runs.iter().enumerate() {
            let mut sum = 0.0;
            for s in sim.states() {
                let avg = s.avg_aoi().unwrap_or(f64::NAN);
                sum += avg;
                per_link.push(LinkSummary {
                    topology: t,
                    avg_aoi: avg,
                    emp_success_prob: s.empirical_success_prob(),
                    emp_active_prob: s.empirical_active_fraction().unwrap_or(0.0),
                    busy_fraction: s.busy_fraction().unwrap_or(0.0),
                    counters: s.counters,
                });
            }
            per_topology.push(TopologySummary { links: sim.states().len(), aoi_sum: sum });
            let c = sim.cascade_stats();
            cascade.near += c.near;
            cascade.mid += c.mid;
            cascade.far += c.far;
        }
        let n: usize = per_topology.iter().map(|t| t.links).sum();
        let mean = if n > 0 {
            per_topology.iter().map(|t| t.aoi_sum).sum::<f64>() / n as f64
        } else {
            f64::NAN
        };
        let stderr = if per_topology.len() > 1 {
            let k = per_topology.len() as f64;
            let ss: f64 = per_topology
                .iter()
                .map(|t| (t.aoi_sum - mean * t.links as f64).powi(2))
                .sum();
            (k / (k - 1.0) * ss).sqrt() / n as f64
        } else if n > 1 {
            let var = per_link.iter().map(|l| (l.avg_aoi - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            f64::NAN
        };
        Self {
            empty_topologies: per_topology.iter().filter(|t| t.links == 0).count(),
            topology_count: runs.len(),
            per_link,
            per_topology,
            network_avg_aoi: mean,
            network_avg_aoi_stderr: stderr,
            slots_simulated: slots,
            cascade,
        }
    }
}

/// Simulates `topology_count` independently sampled realizations.
pub fn run_simulation(cfg: &ValidatedConfig, topology_count: usize) -> Result<SimReport, SimError> {
    run_simulation_with(cfg, topology_count, Channel::Rayleigh)
}

pub fn run_simulation_with(
    cfg: &ValidatedConfig,
    topology_count: usize,
    channel: Channel,
) -> Result<SimReport, SimError> {
    check(cfg, topology_count)?;
    let runs = par::map_range(topology_count, |i| {
        let mut sim = Simulator::for_run(cfg, i as u64, channel);
        sim.run();
        sim
    });
    Ok(SimReport::from_runs(&runs, cfg.cfg().measure_slots))
}

/// Simulates the given topologies instead of sampling new ones. Realization
/// `i` uses the substreams of run `i`.
pub fn run_on_topologies(
    cfg: &ValidatedConfig,
    topologies: &[Topology],
    channel: Channel,
) -> Result<SimReport, SimError> {
    check(cfg, topologies.len())?;
    let runs = par::map_range(topologies.len(), |i| {
        let streams = RunStreams::new(cfg.cfg().seed, i as u64);
        let mut sim = Simulator::new(cfg, topologies[i].clone(), streams, channel);
        sim.run();
        sim
    });
    Ok(SimReport::from_runs(&runs, cfg.cfg().measure_slots))
}

fn check(cfg: &ValidatedConfig, topology_count: usize) -> Result<(), SimError> {
    if topology_count == 0 {
        return Err(SimError::NoTopologies);
    }
    if cfg.cfg().measure_slots == 0 {
        return Err(SimError::NoMeasuredSlots);
    }
    Ok(())
}
