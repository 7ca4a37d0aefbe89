//! Successive approximation of the success-probability distribution.
//!
//! The distribution `F` of `μ` determines the activity marks of the
//! interferers, the marks determine the characteristic function of `ln μ`,
//! and inverting that gives the next `F`. The iteration starts from every
//! interferer active with probability `p`, the most pessimistic load.

use super::cdf::{GridSpec, SuccessCdf};
use super::gil_pelaez::{frequency_count, invert};
use super::mgf::{mgf_grid, FftSpec, MarkDistribution};
use super::AnalysisError;
use crate::config::ValidatedConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    pub grid: GridSpec,
    pub fft: FftSpec,
    /// Stop once successive CDFs differ by less than this in sup norm.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self { grid: GridSpec::default(), fft: FftSpec::default(), tol: 1e-6, max_iter: 100 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardSolution {
    pub cdf: SuccessCdf,
    /// Marks the final CDF was computed from.
    pub marks: MarkDistribution,
    /// Sup-norm change between consecutive iterates, starting with the
    /// second inversion.
    pub history: Vec<f64>,
    /// Inversions performed.
    pub iterations: usize,
    /// `E[ln μ]` of the last iterate.
    pub mean_log: f64,
}

/// One application of the map: marks → CDF.
pub fn picard_step(
    cfg: &ValidatedConfig,
    marks: &MarkDistribution,
    opts: &PicardOptions,
    ys: &[f64],
) -> Result<(SuccessCdf, f64), AnalysisError> {
    let count = frequency_count(opts.grid.bandwidth, opts.fft.step);
    let g = mgf_grid(cfg, marks, opts.fft, count)?;
    let raw = invert(&g, opts.grid.bandwidth, ys)?;
    let grid = ys.iter().map(|y| y.exp()).collect();
    Ok((SuccessCdf::project(grid, raw, opts.grid.bandwidth)?, g.mean_log))
}

pub fn picard_solve(cfg: &ValidatedConfig, opts: &PicardOptions) -> Result<PicardSolution, AnalysisError> {
    opts.grid.validate()?;
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(AnalysisError::Domain("tol must be positive and max_iter at least 1".into()));
    }
    let ys = opts.grid.log_points();
    let mut marks = MarkDistribution::single(cfg.cfg().p);
    let mut prev: Option<SuccessCdf> = None;
    let mut history = Vec::new();
    for it in 1..=opts.max_iter {
        let (cdf, mean_log) = picard_step(cfg, &marks, opts, &ys)?;
        if let Some(p) = &prev {
            let r = cdf.sup_distance(p);
            history.push(r);
            if r < opts.tol {
                return Ok(PicardSolution { cdf, marks, history, iterations: it, mean_log });
            }
        }
        marks = MarkDistribution::from_cdf(cfg, &cdf);
        prev = Some(cdf);
    }
    Err(AnalysisError::NotConverged {
        iterations: opts.max_iter,
        residual: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::NetworkConfig;

    #[test]
    fn saturated_arrivals_converge_in_two_passes() {
        let c = NetworkConfig { lambda: 1e-2, xi: 1.0, p: 0.5, theta: 1.0, ..Default::default() }
            .validate()
            .unwrap();
        let s = picard_solve(&c, &PicardOptions::default()).unwrap();
        assert_eq!(s.iterations, 2);
        assert!(s.history[0] < 1e-6);
    }
}
