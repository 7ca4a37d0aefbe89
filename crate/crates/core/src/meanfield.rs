//! Per-topology mean-field solver.
//!
//! Treating every queue as independent, link `j` transmits in a slot with
//! probability `a_j = pξ / (ξ + (1−ξ) p μ_j)` and decodes with probability
//!
//! ```text
//! μ_j = exp(−θr^α/ρ) ∏_{k≠j} (1 − a_k / (1 + d_kj^α / (θ r^α)))
//! ```
//!
//! The pair is solved by Jacobi iteration starting from the interference-free
//! value, and each link's AoI then follows from its geometric service rate.

use std::io::{self, Write};

use thiserror::Error;

use crate::config::ValidatedConfig;
use crate::par;
use crate::topology::Topology;

/// Above this many links the coupling matrix is recomputed every iteration
/// instead of being stored.
const DENSE_LIMIT: usize = 6000;
/// Iterations without residual decrease, or of successive updates pointing
/// in opposite directions, before damping switches on.
const STALL: usize = 10;

/// `ln(1 − x)` for `x ∈ [0, 1]`, skipping the library call for the tiny
/// couplings of distant links.
#[inline]
fn ln_one_minus(x: f64) -> f64 {
    if x < 1e-5 {
        -x * (1.0 + 0.5 * x)
    } else {
        (-x).ln_1p()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeanFieldError {
    #[error("{name} = {value} outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
    #[error("tol must be positive and max_iter at least 1")]
    BadOptions,
}

fn unit(name: &'static str, v: f64) -> Result<f64, MeanFieldError> {
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(MeanFieldError::Domain { name, value: v, range: "(0,1]" })
    }
}

/// Stationary probability that a link with per-attempt success probability
/// `mu` transmits in a slot.
pub fn active_prob(xi: f64, p: f64, mu: f64) -> Result<f64, MeanFieldError> {
    let (xi, p, mu) = (unit("xi", xi)?, unit("p", p)?, unit("mu", mu)?);
    Ok(p * xi / (xi + (1.0 - xi) * p * mu))
}

/// Average AoI of a link with geometric service at rate `p·mu`.
pub fn conditional_aoi(xi: f64, p: f64, mu: f64) -> Result<f64, MeanFieldError> {
    let (xi, p, mu) = (unit("xi", xi)?, unit("p", p)?, unit("mu", mu)?);
    Ok(1.0 / xi + 1.0 / (p * mu) - 1.0)
}

/// `θ r^α / (θ r^α + d^α)`: the outage weight of an always-on interferer at
/// distance `d`.
fn coupling(theta_r_alpha: f64, half_alpha: f64, d2: f64) -> f64 {
    theta_r_alpha / (theta_r_alpha + d2.powf(half_alpha))
}

/// Success probability of link `j` when every other link `k` is on with
/// probability `a[k]`.
pub fn success_prob_given_activity(topo: &Topology, j: usize, a: &[f64], cfg: &ValidatedConfig) -> f64 {
    let c = cfg.cfg();
    let tra = c.theta * c.r.powf(c.alpha);
    let mut ln = -cfg.noise_exponent();
    for (k, &ak) in a.iter().enumerate() {
        if k != j {
            let d = topo.cross_distance(k, j);
            ln += (-ak * coupling(tra, 0.5 * c.alpha, d * d)).ln_1p();
        }
    }
    ln.exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iter: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldSolution {
    pub mu: Vec<f64>,
    pub a: Vec<f64>,
    pub cond_aoi: Vec<f64>,
    /// Applications of the map, including the one that confirmed convergence.
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<f64>,
    /// Whether damping was switched on, which happens once the residual has
    /// stalled or successive updates have reversed direction for a while.
    pub damped: bool,
}

impl MeanFieldSolution {
    /// Mean of the per-link conditional AoI.
    pub fn mean_aoi(&self) -> Option<f64> {
        (!self.cond_aoi.is_empty()).then(|| self.cond_aoi.iter().sum::<f64>() / self.cond_aoi.len() as f64)
    }

    /// CSV dump with columns `link_id,mu,a,cond_aoi`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "link_id,mu,a,cond_aoi")?;
        for j in 0..self.mu.len() {
            writeln!(w, "{},{},{},{}", j, self.mu[j], self.a[j], self.cond_aoi[j])?;
        }
        Ok(())
    }
}

/// Coupling weights, dense by receiver row when small enough.
enum Coupling<'a> {
    Dense { n: usize, g: Vec<f32> },
    Lazy { topo: &'a Topology, tra: f64, half_alpha: f64 },
}

impl Coupling<'_> {
    fn ln_product(&self, j: usize, a: &[f64]) -> f64 {
        let mut s = 0.0;
        match self {
            Coupling::Dense { n, g } => {
                let row = &g[j * n..(j + 1) * n];
                for (k, (&gk, &ak)) in row.iter().zip(a).enumerate() {
                    if k != j {
                        s += ln_one_minus(ak * gk as f64);
                    }
                }
            }
            Coupling::Lazy { topo, tra, half_alpha } => {
                for (k, &ak) in a.iter().enumerate() {
                    if k != j {
                        let d = topo.cross_distance(k, j);
                        s += ln_one_minus(ak * coupling(*tra, *half_alpha, d * d));
                    }
                }
            }
        }
        s
    }
}

/// Solves the coupled success / activity fixed point of one topology.
pub fn solve_fixed_point(
    topo: &Topology,
    cfg: &ValidatedConfig,
    opts: SolveOptions,
) -> Result<MeanFieldSolution, MeanFieldError> {
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(MeanFieldError::BadOptions);
    }
    let c = cfg.cfg();
    let (xi, p) = (c.xi, c.p);
    let n = topo.len();
    let tra = c.theta * c.r.powf(c.alpha);
    let half_alpha = 0.5 * c.alpha;
    let coupling_store = if n <= DENSE_LIMIT {
        let mut g = vec![0f32; n * n];
        for j in 0..n {
            for k in 0..n {
                if k != j {
                    let d = topo.cross_distance(k, j);
                    g[j * n + k] = coupling(tra, half_alpha, d * d) as f32;
                }
            }
        }
        Coupling::Dense { n, g }
    } else {
        Coupling::Lazy { topo, tra, half_alpha }
    };

    let base = -cfg.noise_exponent();
    let activity = |m: f64| p * xi / (xi + (1.0 - xi) * p * m);
    let mut mu = vec![base.exp(); n];
    let mut next = vec![0.0; n];
    let mut history = Vec::new();
    let mut damped = false;
    let mut best = f64::INFINITY;
    let mut since_best = 0;
    let mut flips = 0;
    let mut step = vec![0.0; n];
    for it in 1..=opts.max_iter {
        let a: Vec<f64> = mu.iter().map(|&m| activity(m)).collect();
        par::fill_indexed(&mut next, |j| (base + coupling_store.ln_product(j, &a)).exp());
        if damped {
            for (x, &m) in next.iter_mut().zip(&mu) {
                *x = 0.5 * (*x + m);
            }
        }
        let mut residual: f64 = 0.0;
        let mut turn = 0.0;
        for j in 0..n {
            let d = next[j] - mu[j];
            residual = residual.max(d.abs());
            turn += d * step[j];
            step[j] = d;
        }
        history.push(residual);
        std::mem::swap(&mut mu, &mut next);
        if residual < opts.tol {
            let a: Vec<f64> = mu.iter().map(|&m| activity(m)).collect();
            let cond_aoi = mu.iter().map(|&m| 1.0 / xi + 1.0 / (p * m) - 1.0).collect();
            return Ok(MeanFieldSolution { mu, a, cond_aoi, iterations: it, residual, history, damped });
        }
        flips = if turn < 0.0 { flips + 1 } else { 0 };
        if residual < best {
            best = residual;
            since_best = 0;
        } else {
            since_best += 1;
        }
        if !damped && (since_best >= STALL || flips >= STALL) {
            damped = true;
        }
    }
    Err(MeanFieldError::NotConverged {
        iterations: opts.max_iter,
        residual: *history.last().unwrap_or(&f64::NAN),
        history,
    })
}
