//! Gil-Pelaez inversion of the characteristic function of `ln μ`.
//!
//! `P(ln μ ≤ y) = 1/2 − (1/π) ∫₀^∞ Im{e^{−jωy} M(jω)} dω/ω`. The integrand is
//! even and smooth in `ω`, so the trapezoid rule on a uniform grid
//! converges geometrically, up to aliasing from mass more than `2π/h` below
//! `y`. A point mass has a characteristic function that never decays, so
//! `M` is multiplied by `exp(−σ²ω²/2)`; the result is then the CDF of
//! `ln μ + σZ` with `Z` standard normal, and the integral can be cut where the
//! damping has made the integrand negligible.

use num_complex::Complex64;

use super::cdf::GridSpec;
use super::mgf::{mgf_grid, FftSpec, MgfContext, MgfGrid};
use super::AnalysisError;
use crate::par;

/// Cut-off in units of `1/σ`.
pub const CUTOFF: f64 = 7.5;
/// Largest tolerated bound on the truncated tail of the integral.
pub const TAIL_TOL: f64 = 1e-9;
/// Steps between exact re-evaluations of the rotating phase.
const REANCHOR: usize = 64;

/// Frequency count needed for bandwidth `sigma` at step `h`.
pub fn frequency_count(sigma: f64, h: f64) -> usize {
    (CUTOFF / sigma / h).ceil() as usize + 1
}

/// Bound on `(1/π) ∫_Ω^∞ e^{−σ²ω²/2} dω/ω`.
pub fn tail_bound(sigma: f64, omega_max: f64) -> f64 {
    let x = sigma * omega_max;
    (-0.5 * x * x).exp() / (std::f64::consts::PI * x * x)
}

/// Smoothed CDF of `ln μ` at each of `ys`, before any projection.
pub fn invert(grid: &MgfGrid, sigma: f64, ys: &[f64]) -> Result<Vec<f64>, AnalysisError> {
    let h = grid.step;
    let k = grid.values.len();
    if k < 2 {
        return Err(AnalysisError::Domain("need at least two frequencies".into()));
    }
    let estimate = tail_bound(sigma, (k - 1) as f64 * h);
    if estimate > TAIL_TOL {
        return Err(AnalysisError::QuadratureNotConverged { estimate });
    }
    // b_k = damped M(jω_k) / ω_k
    let b: Vec<Complex64> = (1..k)
        .map(|i| {
            let w = i as f64 * h;
            grid.values[i] * ((-0.5 * (sigma * w).powi(2)).exp() / w)
        })
        .collect();
    let mut out = vec![0.0; ys.len()];
    par::fill_indexed(&mut out, |i| {
        let y = ys[i];
        let rot = Complex64::from_polar(1.0, -h * y);
        let mut z = rot;
        let mut acc = 0.0;
        for (m, bk) in b.iter().enumerate() {
            if m % REANCHOR == 0 {
                z = Complex64::from_polar(1.0, -((m + 1) as f64) * h * y);
            }
            acc += z.re * bk.im + z.im * bk.re;
            z *= rot;
        }
        let g0 = grid.mean_log - y;
        0.5 - h / std::f64::consts::PI * (0.5 * g0 + acc)
    });
    Ok(out)
}

/// `F(u) = P(μ ≤ u)` for the marks of `ctx`, smoothed with the grid's
/// bandwidth and clamped to `[0, 1]`.
pub fn gil_pelaez_cdf(ctx: &MgfContext, u: f64, grid: GridSpec) -> Result<f64, AnalysisError> {
    if !(u > 0.0 && u < 1.0) {
        return Err(AnalysisError::Domain("u out of (0,1)".into()));
    }
    grid.validate()?;
    let fft = FftSpec::default();
    let g = mgf_grid(ctx.cfg(), ctx.marks(), fft, frequency_count(grid.bandwidth, fft.step))?;
    Ok(invert(&g, grid.bandwidth, &[u.ln()])?[0].clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::mgf::MarkDistribution;
    use crate::config::NetworkConfig;
    use crate::units::dbm_to_watts;

    #[test]
    fn point_mass_becomes_a_step() {
        // raise the noise so the jump sits inside (0, 1)
        let c = NetworkConfig { lambda: 0.0, theta: 1.0, noise: 0.5 * dbm_to_watts(17.0) / 0.5f64.powf(3.8), ..Default::default() }
            .validate()
            .unwrap();
        let jump = c.isolated_success();
        assert!(jump < 0.9 && jump > 0.1, "{jump}");
        let ctx = MgfContext::with_marks(&c, MarkDistribution::single(1.0), 30).unwrap();
        for f in [0.9, 0.96, 1.04, 1.1] {
            let u = jump * f;
            let v = gil_pelaez_cdf(&ctx, u, GridSpec::default()).unwrap();
            let want = if f < 1.0 { 0.0 } else { 1.0 };
            assert!((v - want).abs() < 1e-3, "u={u} F={v}");
        }
    }

    #[test]
    fn rejects_out_of_range_u() {
        let c = NetworkConfig::default().validate().unwrap();
        let ctx = MgfContext::with_marks(&c, MarkDistribution::single(1.0), 30).unwrap();
        assert!(gil_pelaez_cdf(&ctx, 0.0, GridSpec::default()).is_err());
        assert!(gil_pelaez_cdf(&ctx, 1.0, GridSpec::default()).is_err());
    }
}
