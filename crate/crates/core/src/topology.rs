//! Poisson bipolar layouts on the torus.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::config::ValidatedConfig;
use crate::geometry::{signed_delta, torus_dist, wrap, Point};

/// A transmitter and its dedicated receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dipole {
    pub tx: Point,
    pub rx: Point,
}

impl Dipole {
    /// Places the receiver at distance `r` from `tx` in direction `angle`,
    /// wrapped into the window.
    pub fn oriented(tx: Point, r: f64, angle: f64, window: f64) -> Self {
        let rx = Point::new(
            wrap(tx.x + r * angle.cos(), window),
            wrap(tx.y + r * angle.sin(), window),
        );
        Self { tx, rx }
    }

    /// Direction of the tx→rx displacement in `[0, 2π)`.
    pub fn orientation(&self, window: f64) -> f64 {
        let dx = signed_delta(self.tx.x, self.rx.x, window);
        let dy = signed_delta(self.tx.y, self.rx.y, window);
        dy.atan2(dx).rem_euclid(TAU)
    }
}

/// A realized set of links in a square torus of side `window`.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub dipoles: Vec<Dipole>,
    pub window: f64,
}

impl Topology {
    pub fn new(dipoles: Vec<Dipole>, window: f64) -> Self {
        Self { dipoles, window }
    }

    /// One link with nothing else in the window.
    pub fn isolated(r: f64, window: f64) -> Self {
        let c = 0.5 * window;
        Self::new(vec![Dipole::oriented(Point::new(c, c), r, 0.0, window)], window)
    }

    pub fn len(&self) -> usize {
        self.dipoles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dipoles.is_empty()
    }

    /// Torus distance from transmitter `k` to receiver `j`.
    pub fn cross_distance(&self, k: usize, j: usize) -> f64 {
        torus_dist(self.dipoles[k].tx, self.dipoles[j].rx, self.window)
    }

    /// Copy with links reordered so that new link `i` is old link `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::new(perm.iter().map(|&i| self.dipoles[i]).collect(), self.window)
    }
}

/// Draws a Poisson bipolar layout: `Poisson(λL²)` transmitters uniform on
/// the window, each with a receiver at distance `r` in a uniform direction.
pub fn sample_topology<R: Rng + ?Sized>(cfg: &ValidatedConfig, rng: &mut R) -> Topology {
    let c = cfg.cfg();
    let side = c.window;
    let mean = c.lambda * side * side;
    let n = if mean > 0.0 {
        // Poisson::new only fails for non-positive or non-finite means
        Poisson::new(mean).expect("finite positive mean").sample(rng) as usize
    } else {
        0
    };
    let mut dipoles = Vec::with_capacity(n);
    for _ in 0..n {
        let tx = Point::new(rng.random::<f64>() * side, rng.random::<f64>() * side);
        let angle = rng.random::<f64>() * TAU;
        dipoles.push(Dipole::oriented(Point::new(wrap(tx.x, side), wrap(tx.y, side)), c.r, angle, side));
    }
    Topology::new(dipoles, side)
}
