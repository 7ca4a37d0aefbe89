#![allow(dead_code)]

use aoi_mesh::rng::RunStreams;
use aoi_mesh::sim::{Channel, SlotEvent, Simulator};
use aoi_mesh::{NetworkConfig, Topology, ValidatedConfig};

pub fn cfg(lambda: f64, xi: f64, p: f64) -> ValidatedConfig {
    NetworkConfig { lambda, xi, p, ..Default::default() }.validate().unwrap()
}

/// One link on an empty torus whose attempts succeed with probability `q`.
pub fn isolated_run(xi: f64, p: f64, q: f64, slots: u64, seed: u64, trace: bool) -> Simulator {
    let c = NetworkConfig { xi, p, seed, warmup_slots: 1000, measure_slots: slots, ..Default::default() }
        .validate()
        .unwrap();
    let topo = Topology::isolated(c.cfg().r, c.cfg().window);
    let mut sim = Simulator::new(&c, topo, RunStreams::new(seed, 0), Channel::ForcedSuccess(q));
    if trace {
        sim = sim.with_trace();
    }
    sim.run();
    sim
}

/// `1/ξ + 1/(pμ) − 1`.
pub fn isolated_aoi_formula(xi: f64, p: f64, mu: f64) -> f64 {
    1.0 / xi + 1.0 / (p * mu) - 1.0
}

/// Asymptotic Kolmogorov survival function `Q(x) = 2 Σ (−1)^{k−1} e^{−2k²x²}`.
pub fn kolmogorov_q(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * x * x).exp();
        s += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample KS statistic and p-value of integer samples against a
/// geometric law on `{1, 2, …}` with success probability `q`.
pub fn ks_geometric(samples: &[u64], q: f64) -> (f64, f64) {
    let mut xs = samples.to_vec();
    xs.sort_unstable();
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let v = xs[i];
        let below = i as f64 / n;
        while i < xs.len() && xs[i] == v {
            i += 1;
        }
        let upto = i as f64 / n;
        let f_prev = 1.0 - (1.0 - q).powi(v as i32 - 1);
        let f = 1.0 - (1.0 - q).powi(v as i32);
        d = d.max((upto - f).abs()).max((below - f_prev).abs());
    }
    (d, kolmogorov_q(d * n.sqrt()))
}

/// Standard error of the mean of a correlated series by batch means.
pub fn batch_stderr(xs: &[f64], batches: usize) -> f64 {
    let size = xs.len() / batches;
    let means: Vec<f64> = (0..batches).map(|b| xs[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64).collect();
    let m = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (batches - 1) as f64;
    (var / batches as f64).sqrt()
}

/// Inter-arrival gaps between packets and, for each packet, the delay until
/// the first later transmission attempt that succeeds. The number of slots
/// from an arrival until its packet is delivered or replaced is
/// `min(M, N)` of those two.
pub fn replacement_or_delivery_times(trace: &[SlotEvent]) -> Vec<u64> {
    let mut out = Vec::new();
    let mut pending: Option<u64> = None;
    for e in trace {
        if e.arrived {
            if let Some(t0) = pending {
                out.push(e.slot - t0);
            }
            pending = Some(e.slot);
        }
        if e.delivered {
            if let Some(t0) = pending.take() {
                out.push(e.slot - t0 + 1);
            }
        }
    }
    out
}
