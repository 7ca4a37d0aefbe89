//! Distribution-level analysis over all topologies.
//!
//! The law of the per-link success probability `μ` is the fixed point of a
//! map from CDFs to CDFs, found by [`picard_solve`]; [`network_aoi`] then
//! turns it into the network average AoI.

pub mod aoi;
pub mod cdf;
pub mod gil_pelaez;
pub mod mgf;
pub mod picard;
pub mod quad;
pub mod special;

use thiserror::Error;

pub use aoi::{network_aoi, noise_limited_aoi, AnalysisFlag, AoiEstimate};
pub use cdf::{GridSpec, SuccessCdf};
pub use gil_pelaez::gil_pelaez_cdf;
pub use mgf::{mgf_grid, FftSpec, MarkDistribution, MgfContext, MgfGrid};
pub use picard::{picard_solve, PicardOptions, PicardSolution};
pub use special::{complex_binomial, inner_integral_ck};

use crate::config::ValidatedConfig;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("{0}")]
    Domain(String),
    #[error("invalid CDF: {0}")]
    InvalidCdf(String),
    #[error("quadrature did not converge (error estimate {estimate:e})")]
    QuadratureNotConverged { estimate: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
    #[error("divergence suspected: {reason} (mass below grid {mass_below_grid})")]
    DivergenceSuspected { mass_below_grid: f64, reason: String },
}

/// Fixed-point distribution together with the AoI it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub solution: PicardSolution,
    pub aoi: Result<AoiEstimate, AnalysisError>,
}

/// Solves for the distribution of `μ` and evaluates the network AoI. Fails
/// only if the fixed point itself cannot be found.
pub fn analyze(cfg: &ValidatedConfig, opts: &PicardOptions) -> Result<Analysis, AnalysisError> {
    let solution = picard_solve(cfg, opts)?;
    let aoi = network_aoi(cfg, &solution.cdf);
    Ok(Analysis { solution, aoi })
}
