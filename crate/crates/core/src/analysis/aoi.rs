//! Network average AoI from the success-probability distribution.

use super::cdf::SuccessCdf;
use super::mgf::{closed_form_inverse_moment, MarkDistribution};
use super::AnalysisError;
use crate::config::ValidatedConfig;

/// Mass below the grid that gets flagged.
pub const MASS_FLAG: f64 = 0.01;
/// Mass below the grid at which no number is reported.
pub const MASS_REFUSE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisFlag {
    /// More than [`MASS_FLAG`] of the distribution sits below the grid.
    MassBelowGrid,
    /// The untruncated `E[1/μ]` is infinite. The reported value is the
    /// expectation with `1/μ` capped at the bottom of the grid.
    DivergenceSuspected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AoiEstimate {
    /// Network average AoI, slots.
    pub value: f64,
    /// `E[1/μ]` from the CDF increments.
    pub inverse_moment: f64,
    /// `E[1/μ]` in closed form from the activity marks the CDF implies.
    pub closed_form_inverse_moment: f64,
    pub mass_below_grid: f64,
    pub flags: Vec<AnalysisFlag>,
}

/// `1/ξ − 1 + E[1/μ]/p`, with `E[1/μ]` a Stieltjes sum over the CDF.
///
/// The lump below the grid is charged at `t_0`, each cell's increment at
/// its geometric midpoint and the mass above the grid at its last point. A
/// smoothed CDF is corrected for its Gaussian kernel, which inflates
/// `E[1/μ]` by `exp(σ²/2)`.
pub fn network_aoi(cfg: &ValidatedConfig, cdf: &SuccessCdf) -> Result<AoiEstimate, AnalysisError> {
    let mass_below_grid = cdf.mass_below_grid();
    if mass_below_grid > MASS_REFUSE {
        return Err(AnalysisError::DivergenceSuspected {
            mass_below_grid,
            reason: "too much mass below the grid".into(),
        });
    }
    let closed = if cfg.interference_scale() > 0.0 {
        closed_form_inverse_moment(cfg, &MarkDistribution::from_cdf(cfg, cdf))
    } else {
        cfg.noise_exponent().exp()
    };
    let sigma = cdf.bandwidth();
    let s: f64 = cdf.atoms().iter().map(|&(t, m)| m / t).sum::<f64>() * (-0.5 * sigma * sigma).exp();
    let c = cfg.cfg();
    let mut flags = Vec::new();
    if mass_below_grid > MASS_FLAG {
        flags.push(AnalysisFlag::MassBelowGrid);
    }
    // interferers that are always on put a t^{-δ} tail on 1/μ
    if !closed.is_finite() {
        flags.push(AnalysisFlag::DivergenceSuspected);
    }
    Ok(AoiEstimate {
        value: 1.0 / c.xi - 1.0 + s / c.p,
        inverse_moment: s,
        closed_form_inverse_moment: closed,
        mass_below_grid,
        flags,
    })
}

/// AoI of an interference-free link: `1/ξ + exp(θr^α/ρ)/p − 1`.
pub fn noise_limited_aoi(cfg: &ValidatedConfig) -> f64 {
    let c = cfg.cfg();
    1.0 / c.xi + cfg.noise_exponent().exp() / c.p - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::NetworkConfig;

    #[test]
    fn noise_limited_examples() {
        let tiny = |xi, p| NetworkConfig { xi, p, noise: 1e-40, ..Default::default() }.validate().unwrap();
        assert!((noise_limited_aoi(&tiny(0.5, 1.0)) - 2.0).abs() < 1e-12);
        assert!((noise_limited_aoi(&tiny(0.25, 0.5)) - 5.0).abs() < 1e-12);
        let d = NetworkConfig { xi: 0.5, theta: 1.0, p_tx: 0.0501, noise: 1e-12, ..Default::default() }
            .validate()
            .unwrap();
        let extra = noise_limited_aoi(&d) - 2.0;
        assert!((extra - 0.5f64.powf(3.8) / 5.01e10).abs() < 1e-15);
    }

    #[test]
    fn point_mass_cdf_gives_exact_moment() {
        let c = NetworkConfig { lambda: 0.0, xi: 0.5, p: 0.5, ..Default::default() }.validate().unwrap();
        let cdf = SuccessCdf::point_mass(0.5, vec![0.25, 0.5, 1.0]).unwrap();
        // the increment at 0.5 is charged at the cell midpoint sqrt(0.125)
        let e = network_aoi(&c, &cdf).unwrap();
        assert!((e.inverse_moment - 1.0 / 0.125f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn heavy_lump_refused() {
        let c = NetworkConfig { lambda: 1e-2, ..Default::default() }.validate().unwrap();
        let cdf = SuccessCdf::new(vec![1e-4, 1.0], vec![0.2, 1.0], 0.0).unwrap();
        assert!(matches!(network_aoi(&c, &cdf), Err(AnalysisError::DivergenceSuspected { .. })));
    }
}
