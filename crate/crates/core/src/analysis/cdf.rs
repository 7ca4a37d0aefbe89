//! Grid representation of the distribution of the per-link success
//! probability.

use std::io::{self, Write};

use super::AnalysisError;

/// Abscissae for a [`SuccessCdf`].
///
/// The grid is uniform in `ln t` with step `bandwidth / 4` from `t_min` to
/// `exp(8 · bandwidth)`. It runs a little past 1 because the inverted CDF is
/// smoothed by a Gaussian of standard deviation `bandwidth` in `ln t`, and the
/// smoothed mass above 1 must stay on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub t_min: f64,
    pub bandwidth: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { t_min: 1e-4, bandwidth: 0.01 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        if !(self.t_min > 0.0 && self.t_min < 1.0) {
            return Err(AnalysisError::Domain("t_min out of (0,1)".into()));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth <= 0.1) {
            return Err(AnalysisError::Domain("bandwidth out of (0,0.1]".into()));
        }
        Ok(())
    }

    pub fn log_step(&self) -> f64 {
        0.25 * self.bandwidth
    }

    pub fn log_points(&self) -> Vec<f64> {
        let y0 = self.t_min.ln();
        let top = 8.0 * self.bandwidth;
        let n = ((top - y0) / self.log_step()).floor() as usize + 1;
        (0..n).map(|i| y0 + i as f64 * self.log_step()).collect()
    }

    pub fn abscissae(&self) -> Vec<f64> {
        self.log_points().into_iter().map(f64::exp).collect()
    }
}

/// Non-decreasing CDF values on a strictly increasing grid.
///
/// Any mass below `grid[0]` is lumped at `grid[0]`, so `values[0]` is also the
/// mass the grid could not resolve.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessCdf {
    grid: Vec<f64>,
    values: Vec<f64>,
    /// Standard deviation, in `ln t`, of the Gaussian the CDF is smoothed
    /// with; zero for empirical CDFs.
    bandwidth: f64,
}

impl SuccessCdf {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, bandwidth: f64) -> Result<Self, AnalysisError> {
        if grid.is_empty() || grid.len() != values.len() {
            return Err(AnalysisError::InvalidCdf("grid and values must be non-empty and equally long".into()));
        }
        if !(grid[0] > 0.0) || grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(AnalysisError::InvalidCdf("grid must be positive and strictly increasing".into()));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) || values.windows(2).any(|w| w[1] < w[0]) {
            return Err(AnalysisError::InvalidCdf("values must be non-decreasing in [0,1]".into()));
        }
        Ok(Self { grid, values, bandwidth })
    }

    /// Running maximum followed by clamping to `[0, 1]`.
    pub fn project(grid: Vec<f64>, mut raw: Vec<f64>, bandwidth: f64) -> Result<Self, AnalysisError> {
        let mut m = f64::NEG_INFINITY;
        for v in raw.iter_mut() {
            m = m.max(*v);
            *v = m.clamp(0.0, 1.0);
        }
        Self::new(grid, raw, bandwidth)
    }

    /// Empirical CDF of `samples` read off at the grid points.
    pub fn empirical(samples: &[f64], grid: Vec<f64>) -> Result<Self, AnalysisError> {
        if samples.is_empty() {
            return Err(AnalysisError::InvalidCdf("no samples".into()));
        }
        let mut s = samples.to_vec();
        s.sort_by(f64::total_cmp);
        let n = s.len() as f64;
        let values = grid.iter().map(|&t| s.partition_point(|&x| x <= t) as f64 / n).collect();
        Self::new(grid, values, 0.0)
    }

    /// All mass at `at`.
    pub fn point_mass(at: f64, grid: Vec<f64>) -> Result<Self, AnalysisError> {
        let values = grid.iter().map(|&t| if t >= at { 1.0 } else { 0.0 }).collect();
        Self::new(grid, values, 0.0)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// `F(t_0)`: mass at or below the first grid point.
    pub fn mass_below_grid(&self) -> f64 {
        self.values[0]
    }

    /// Mass above the last grid point.
    pub fn mass_above_grid(&self) -> f64 {
        1.0 - self.values[self.values.len() - 1]
    }

    /// `F(t)`, linear in `ln t` between grid points and zero below the grid.
    pub fn eval(&self, t: f64) -> f64 {
        let g = &self.grid;
        if t < g[0] {
            return 0.0;
        }
        let i = g.partition_point(|&x| x <= t);
        if i >= g.len() {
            return self.values[g.len() - 1];
        }
        let (t0, t1) = (g[i - 1], g[i]);
        let w = (t / t0).ln() / (t1 / t0).ln();
        self.values[i - 1] + w * (self.values[i] - self.values[i - 1])
    }

    /// Point masses `(t, mass)` whose sum reproduces the CDF: the lump at
    /// `t_0`, each cell's increment at the geometric midpoint of the cell,
    /// and whatever is left above the grid at the last point.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.grid.len() + 1);
        out.push((self.grid[0], self.values[0]));
        for i in 1..self.grid.len() {
            let dm = self.values[i] - self.values[i - 1];
            if dm > 0.0 {
                out.push(((self.grid[i] * self.grid[i - 1]).sqrt(), dm));
            }
        }
        out.push((self.grid[self.grid.len() - 1], self.mass_above_grid()));
        out
    }

    /// Largest gap to the empirical CDF of `samples`, checked on both sides
    /// of every sample.
    pub fn kolmogorov_distance(&self, samples: &[f64]) -> f64 {
        let mut s = samples.to_vec();
        s.sort_by(f64::total_cmp);
        let n = s.len() as f64;
        let mut d: f64 = 0.0;
        for (i, &x) in s.iter().enumerate() {
            let f = self.eval(x);
            d = d.max((f - i as f64 / n).abs()).max((f - (i + 1) as f64 / n).abs());
        }
        d
    }

    /// Sup-norm distance to another CDF on the same grid.
    pub fn sup_distance(&self, other: &SuccessCdf) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// CSV with columns `t,F`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,F")?;
        for (t, f) in self.grid.iter().zip(&self.values) {
            writeln!(w, "{t},{f}")?;
        }
        Ok(())
    }
}
