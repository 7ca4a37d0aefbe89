//! Per-receiver interference bookkeeping for the Rayleigh channel.
//!
//! Under Rayleigh fading the success probability of link `j` given the set
//! `A` of active transmitters has the product form
//!
//! ```text
//! P(SINR_j > θ | A) = exp(−θ r^α / ρ) · ∏_{k ∈ A, k ≠ j} 1 / (1 + θ (r / d_kj)^α)
//! ```
//!
//! so a slot outcome can be decided with one uniform per active link,
//! comparing `ln U` against the log of this product. Most of the product
//! comes from a handful of close transmitters. The map splits interferers by
//! cell distance into near (always summed), mid (summed on demand) and far
//! (bounded from below by assuming every far transmitter is active, summed
//! exactly only when the bounds do not settle the comparison).

use crate::config::ValidatedConfig;
use crate::geometry::torus_dist2;
use crate::topology::Topology;

/// Target cell side, metres.
const CELL: f64 = 6.0;
const MAX_CELLS: usize = 64;
/// Chebyshev cell radius covered by the near list.
const NEAR: i64 = 1;
/// Chebyshev cell radius covered by the near and mid lists together.
const MID: i64 = 3;

/// Compressed list of `(transmitter, ln factor)` per receiver.
#[derive(Debug, Clone, Default)]
struct Csr {
    start: Vec<usize>,
    idx: Vec<u32>,
    lnf: Vec<f64>,
}

impl Csr {
    fn row(&self, j: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.start[j], self.start[j + 1]);
        (&self.idx[a..b], &self.lnf[a..b])
    }
}

/// Precomputed interference structure of one topology.
#[derive(Debug, Clone)]
pub struct InterferenceMap {
    noise_exponent: f64,
    theta_r_alpha: f64,
    half_alpha: f64,
    window: f64,
    n: usize,
    /// Every interferer is in the near list when the grid is too coarse
    /// for the mid and far rings to be distinct.
    complete: bool,
    near: Csr,
    mid: Csr,
    mid_floor: Vec<f64>,
    far_floor: Vec<f64>,
    tx_cell: Vec<(i64, i64)>,
    rx_cell: Vec<(i64, i64)>,
    topo: Topology,
}

/// Outcome of one success test, with the stage that settled it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decided {
    Near,
    Mid,
    Far,
}

impl InterferenceMap {
    pub fn new(cfg: &ValidatedConfig, topo: &Topology) -> Self {
        let c = cfg.cfg();
        let side = topo.window;
        let n = ((side / CELL).floor() as usize).clamp(1, MAX_CELLS);
        let cell = side / n as f64;
        let cell_of = |x: f64, y: f64| {
            let cx = ((x / cell) as i64).min(n as i64 - 1);
            let cy = ((y / cell) as i64).min(n as i64 - 1);
            (cx, cy)
        };
        let tx_cell: Vec<_> = topo.dipoles.iter().map(|d| cell_of(d.tx.x, d.tx.y)).collect();
        let rx_cell: Vec<_> = topo.dipoles.iter().map(|d| cell_of(d.rx.x, d.rx.y)).collect();
        let theta_r_alpha = c.theta * c.r.powf(c.alpha);
        let half_alpha = 0.5 * c.alpha;
        let complete = n < (2 * MID + 1) as usize;
        let mut map = Self {
            noise_exponent: cfg.noise_exponent(),
            theta_r_alpha,
            half_alpha,
            window: side,
            n,
            complete,
            near: Csr::default(),
            mid: Csr::default(),
            mid_floor: vec![0.0; topo.len()],
            far_floor: vec![0.0; topo.len()],
            tx_cell,
            rx_cell,
            topo: topo.clone(),
        };
        map.build_lists();
        if !complete {
            map.build_far_floor(cell);
        }
        map
    }

    fn ln_factor_d2(&self, d2: f64) -> f64 {
        -(self.theta_r_alpha / d2.powf(self.half_alpha)).ln_1p()
    }

    /// `ln(1 / (1 + θ (r / d_kj)^α))`.
    pub fn ln_factor(&self, k: usize, j: usize) -> f64 {
        let d2 = torus_dist2(self.topo.dipoles[k].tx, self.topo.dipoles[j].rx, self.window);
        self.ln_factor_d2(d2)
    }

    fn wrapped(&self, d: i64) -> i64 {
        let n = self.n as i64;
        let d = d.rem_euclid(n);
        if d > n / 2 {
            d - n
        } else {
            d
        }
    }

    fn ring(&self, k: usize, j: usize) -> i64 {
        let (tx, rx) = (self.tx_cell[k], self.rx_cell[j]);
        self.wrapped(tx.0 - rx.0).abs().max(self.wrapped(tx.1 - rx.1).abs())
    }

    fn build_lists(&mut self) {
        let len = self.topo.len();
        let n = self.n;
        let mut bucket: Vec<Vec<u32>> = vec![Vec::new(); n * n];
        for (k, &(cx, cy)) in self.tx_cell.iter().enumerate() {
            bucket[cy as usize * n + cx as usize].push(k as u32);
        }
        let mut near = Csr { start: vec![0], ..Default::default() };
        let mut mid = Csr { start: vec![0], ..Default::default() };
        for j in 0..len {
            let mut mid_floor = 0.0;
            if self.complete {
                for k in 0..len {
                    if k != j {
                        near.idx.push(k as u32);
                        near.lnf.push(self.ln_factor(k, j));
                    }
                }
            } else {
                let (rx, ry) = self.rx_cell[j];
                for oy in -MID..=MID {
                    for ox in -MID..=MID {
                        let cx = (rx + ox).rem_euclid(n as i64) as usize;
                        let cy = (ry + oy).rem_euclid(n as i64) as usize;
                        let is_near = ox.abs().max(oy.abs()) <= NEAR;
                        for &k in &bucket[cy * n + cx] {
                            if k as usize == j {
                                continue;
                            }
                            let f = self.ln_factor(k as usize, j);
                            if is_near {
                                near.idx.push(k);
                                near.lnf.push(f);
                            } else {
                                mid.idx.push(k);
                                mid.lnf.push(f);
                                mid_floor += f;
                            }
                        }
                    }
                }
            }
            near.start.push(near.idx.len());
            mid.start.push(mid.idx.len());
            self.mid_floor[j] = mid_floor;
        }
        self.near = near;
        self.mid = mid;
    }

    /// Lower bound on the far contribution: every transmitter beyond the mid
    /// ring active and as close as its cell allows.
    fn build_far_floor(&mut self, cell: f64) {
        let n = self.n as i64;
        let nu = self.n;
        let mut count = vec![0.0f64; nu * nu];
        for &(cx, cy) in &self.tx_cell {
            count[cy as usize * nu + cx as usize] += 1.0;
        }
        // weight by wrapped offset, zero inside the mid ring
        let mut weight = vec![0.0f64; nu * nu];
        for oy in 0..n {
            for ox in 0..n {
                let (wx, wy) = (self.wrapped(ox).abs(), self.wrapped(oy).abs());
                if wx.max(wy) <= MID {
                    continue;
                }
                let gx = (wx - 1).max(0) as f64 * cell;
                let gy = (wy - 1).max(0) as f64 * cell;
                weight[oy as usize * nu + ox as usize] = self.ln_factor_d2(gx * gx + gy * gy);
            }
        }
        let mut floor_by_cell = vec![0.0f64; nu * nu];
        for ry in 0..n {
            for rx in 0..n {
                let mut s = 0.0;
                for ty in 0..n {
                    let oy = (ty - ry).rem_euclid(n) as usize;
                    for tx in 0..n {
                        let c = count[ty as usize * nu + tx as usize];
                        if c > 0.0 {
                            let ox = (tx - rx).rem_euclid(n) as usize;
                            s += c * weight[oy * nu + ox];
                        }
                    }
                }
                floor_by_cell[ry as usize * nu + rx as usize] = s;
            }
        }
        for (j, &(cx, cy)) in self.rx_cell.iter().enumerate() {
            self.far_floor[j] = floor_by_cell[cy as usize * nu + cx as usize];
        }
    }

    pub fn len(&self) -> usize {
        self.topo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topo.is_empty()
    }

    /// Exact log success probability of link `j` when the transmitters
    /// flagged in `active` are on.
    pub fn ln_success(&self, j: usize, active: &[bool]) -> f64 {
        let mut s = -self.noise_exponent;
        for (k, &on) in active.iter().enumerate() {
            if on && k != j {
                s += self.ln_factor(k, j);
            }
        }
        s
    }

    /// Decides whether link `j` decodes given the active flags and the log
    /// of a uniform draw. Returns the decision and the stage that made it.
    pub fn decide(&self, j: usize, active: &[bool], active_list: &[u32], ln_u: f64) -> (bool, Decided) {
        let (idx, lnf) = self.near.row(j);
        let mut upper = -self.noise_exponent;
        for (&k, &f) in idx.iter().zip(lnf) {
            if active[k as usize] {
                upper += f;
            }
        }
        if ln_u >= upper {
            return (false, Decided::Near);
        }
        if self.complete {
            return (true, Decided::Near);
        }
        let far = self.far_floor[j];
        if ln_u < upper + self.mid_floor[j] + far {
            return (true, Decided::Near);
        }
        let (idx, lnf) = self.mid.row(j);
        for (&k, &f) in idx.iter().zip(lnf) {
            if active[k as usize] {
                upper += f;
            }
        }
        if ln_u >= upper {
            return (false, Decided::Mid);
        }
        if ln_u < upper + far {
            return (true, Decided::Mid);
        }
        for &k in active_list {
            let k = k as usize;
            if k != j && self.ring(k, j) > MID {
                upper += self.ln_factor(k, j);
            }
        }
        (ln_u < upper, Decided::Far)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::NetworkConfig;
    use crate::topology::sample_topology;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(lambda: f64, window: f64) -> (ValidatedConfig, Topology) {
        let cfg = NetworkConfig { lambda, window, ..Default::default() }.validate().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let topo = sample_topology(&cfg, &mut rng);
        (cfg, topo)
    }

    #[test]
    fn cascade_agrees_with_exact_log_probability() {
        for (lambda, window) in [(5e-2, 80.0), (5e-2, 30.0), (1e-2, 60.0)] {
            let (cfg, topo) = setup(lambda, window);
            let map = InterferenceMap::new(&cfg, &topo);
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..20 {
                let active: Vec<bool> = (0..topo.len()).map(|_| rng.random_bool(0.6)).collect();
                let list: Vec<u32> = (0..topo.len() as u32).filter(|&k| active[k as usize]).collect();
                for j in 0..topo.len() {
                    let exact = map.ln_success(j, &active);
                    // probe right at, just below and just above the threshold
                    for ln_u in [exact - 1e-9, exact + 1e-9, exact - 1e-3, exact + 1e-3, rng.random::<f64>().ln()] {
                        let (ok, _) = map.decide(j, &active, &list, ln_u);
                        assert_eq!(ok, ln_u < exact, "j={j} ln_u={ln_u} exact={exact}");
                    }
                }
            }
        }
    }

    #[test]
    fn floors_are_lower_bounds() {
        let (cfg, topo) = setup(5e-2, 80.0);
        let map = InterferenceMap::new(&cfg, &topo);
        let all = vec![true; topo.len()];
        for j in 0..topo.len() {
            let mut far = 0.0;
            for k in 0..topo.len() {
                if k != j && map.ring(k, j) > MID {
                    far += map.ln_factor(k, j);
                }
            }
            assert!(map.far_floor[j] <= far + 1e-15);
            assert!(map.ln_success(j, &all) <= -map.noise_exponent);
        }
    }
}
