//! Characteristic function of `Y = ln μ` for the typical link.
//!
//! Interferers form a marked Poisson process whose marks are their activity
//! probabilities `a`. Conditioned on the marks, an interferer at normalized
//! distance `v` multiplies `μ` by `1 − a/(1 + v^{α/2})`, so
//!
//! ```text
//! ln E[μ^s] = −s θr^α/ρ − λπr²θ^δ E_a ∫₀^∞ [1 − (1 − a/(1 + v^{α/2}))^s] dv.
//! ```
//!
//! Three evaluations of this are provided. [`MgfContext::eval`] integrates
//! the right-hand side by adaptive quadrature. [`MgfContext::eval_series`]
//! expands the bracket in powers of `a`, which is convenient but loses all
//! precision once `|s|` grows past about 10. [`mgf_grid`] gets every
//! `s = jω` on a uniform grid at once: writing the integral as a Laplace
//! transform of the tail of the jump measure of `−Y` and taking that
//! transform with an FFT.

use num_complex::Complex64;
use rustfft::FftPlanner;
use statrs::function::gamma::gamma;

use super::cdf::SuccessCdf;
use super::quad::{integrate, QuadOptions};
use super::special::{ck_table, complex_binomial, inner_integral_ck};
use super::AnalysisError;
use crate::config::ValidatedConfig;
use crate::par;

/// Upper bound on the number of distinct activity marks kept.
pub const MAX_MARKS: usize = 256;

/// Discrete distribution of interferer activity probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkDistribution {
    pub marks: Vec<f64>,
    pub masses: Vec<f64>,
}

impl MarkDistribution {
    /// Every interferer active with probability `a`.
    pub fn single(a: f64) -> Self {
        Self { marks: vec![a], masses: vec![1.0] }
    }

    /// Bins weighted marks into at most [`MAX_MARKS`] equal-width bins,
    /// keeping the mass and mean mark of each bin.
    pub fn from_weighted(pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let pairs: Vec<(f64, f64)> = pairs.into_iter().filter(|p| p.1 > 0.0).collect();
        if pairs.is_empty() {
            return Self { marks: Vec::new(), masses: Vec::new() };
        }
        let lo = pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi = pairs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        if hi - lo < 1e-12 {
            let m: f64 = pairs.iter().map(|p| p.1).sum();
            let a = pairs.iter().map(|p| p.0 * p.1).sum::<f64>() / m;
            return Self { marks: vec![a], masses: vec![m] };
        }
        let mut mass = vec![0.0; MAX_MARKS];
        let mut first = vec![0.0; MAX_MARKS];
        for (a, m) in pairs {
            let b = (((a - lo) / (hi - lo)) * MAX_MARKS as f64) as usize;
            let b = b.min(MAX_MARKS - 1);
            mass[b] += m;
            first[b] += m * a;
        }
        let (mut marks, mut masses) = (Vec::new(), Vec::new());
        for b in 0..MAX_MARKS {
            if mass[b] > 0.0 {
                marks.push((first[b] / mass[b]).clamp(lo, hi));
                masses.push(mass[b]);
            }
        }
        Self { marks, masses }
    }

    /// Activity marks implied by a success-probability CDF.
    pub fn from_cdf(cfg: &ValidatedConfig, cdf: &SuccessCdf) -> Self {
        Self::from_weighted(cdf.atoms().into_iter().map(|(t, m)| (cfg.activity(t.min(1.0)), m)))
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// `E[a^k]`.
    pub fn moment(&self, k: u32) -> f64 {
        self.marks.iter().zip(&self.masses).map(|(a, m)| m * a.powi(k as i32)).sum()
    }

    /// `E[a^δ]`.
    pub fn moment_real(&self, x: f64) -> f64 {
        self.marks.iter().zip(&self.masses).map(|(a, m)| m * a.powf(x)).sum()
    }

    /// `E[a (1−a)^{δ−1}]`, infinite if a mark sits at 1.
    pub fn inverse_moment_term(&self, delta: f64) -> f64 {
        self.marks
            .iter()
            .zip(&self.masses)
            .map(|(&a, &m)| if a >= 1.0 { f64::INFINITY } else { m * a * (1.0 - a).powf(delta - 1.0) })
            .sum()
    }
}

/// Result of the truncated power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    /// `|last term| / |partial sum|`.
    pub tail_ratio: f64,
    /// Whether `tail_ratio` exceeds `1e-8`.
    pub tail_exceeded: bool,
}

/// Everything needed to evaluate the characteristic function for one
/// activity-mark distribution.
#[derive(Debug, Clone)]
pub struct MgfContext {
    cfg: ValidatedConfig,
    order: u32,
    ck: Vec<f64>,
    marks: MarkDistribution,
}

/// Default truncation order of the power series.
pub const DEFAULT_ORDER: u32 = 30;

impl MgfContext {
    /// Context for the marks induced by `cdf`.
    pub fn new(cfg: &ValidatedConfig, cdf: &SuccessCdf, order: u32) -> Result<Self, AnalysisError> {
        Self::with_marks(cfg, MarkDistribution::from_cdf(cfg, cdf), order)
    }

    pub fn with_marks(cfg: &ValidatedConfig, marks: MarkDistribution, order: u32) -> Result<Self, AnalysisError> {
        Ok(Self {
            ck: ck_table(cfg.cfg().alpha, order)?,
            cfg: cfg.clone(),
            order,
            marks,
        })
    }

    pub fn cfg(&self) -> &ValidatedConfig {
        &self.cfg
    }

    pub fn marks(&self) -> &MarkDistribution {
        &self.marks
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn ck(&self) -> &[f64] {
        &self.ck
    }

    /// `E[μ^{jω}]` by quadrature of the interference integral.
    pub fn eval(&self, omega: f64) -> Result<Complex64, AnalysisError> {
        if omega == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let scale = self.cfg.interference_scale();
        let mut psi = Complex64::new(0.0, 0.0);
        if scale > 0.0 {
            for (&a, &m) in self.marks.marks.iter().zip(&self.marks.masses) {
                psi += jump_integral(self.cfg.cfg().alpha, a, omega)? * m;
            }
        }
        let jw = Complex64::new(0.0, omega);
        Ok((-jw * self.cfg.noise_exponent() - psi * scale).exp())
    }

    /// `E[μ^{jω}]` from the first `order` terms of the power series in `a`.
    pub fn eval_series(&self, omega: f64) -> SeriesValue {
        let jw = Complex64::new(0.0, omega);
        let scale = self.cfg.interference_scale();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut last = Complex64::new(0.0, 0.0);
        for k in 1..=self.order {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            last = complex_binomial(jw, k) * (sign * self.ck[k as usize - 1] * self.marks.moment(k));
            sum += last;
        }
        let tail_ratio = if sum.norm() > 0.0 { last.norm() / sum.norm() } else { 0.0 };
        SeriesValue {
            value: (-jw * self.cfg.noise_exponent() - sum * scale).exp(),
            tail_ratio,
            tail_exceeded: tail_ratio > 1e-8,
        }
    }

    /// `E[1/μ]` in closed form: `exp(θr^α/ρ + λπr²θ^δ C_1 E[a(1−a)^{δ−1}])`.
    pub fn inverse_moment(&self) -> f64 {
        closed_form_inverse_moment(&self.cfg, &self.marks)
    }
}

/// `E[1/μ]` for the given marks; infinite when a mark equals 1 and the
/// network is not empty.
pub fn closed_form_inverse_moment(cfg: &ValidatedConfig, marks: &MarkDistribution) -> f64 {
    let scale = cfg.interference_scale();
    let mut ln = cfg.noise_exponent();
    if scale > 0.0 {
        let c1 = inner_integral_ck(cfg.cfg().alpha, 1).expect("alpha validated");
        ln += scale * c1 * marks.inverse_moment_term(cfg.delta());
    }
    ln.exp()
}

/// `∫₀^∞ [1 − (1 − a/(1+v^{α/2}))^{jω}] dv`.
fn jump_integral(alpha: f64, a: f64, omega: f64) -> Result<Complex64, AnalysisError> {
    let h = 0.5 * alpha;
    let f = |v: f64| {
        let w = v.powf(h);
        let l = (-a / (1.0 + w)).ln_1p();
        if !l.is_finite() {
            // a = 1 at v = 0: the phase is undefined on a null set
            return Complex64::new(1.0, 0.0);
        }
        let th = omega * l;
        let s = (0.5 * th).sin();
        Complex64::new(2.0 * s * s, -th.sin())
    };
    let opts = QuadOptions { rel_tol: 1e-10, abs_tol: 1e-13, max_intervals: 20000 };
    let head = integrate(f, 0.0, 1.0, opts)?;
    let q = 4.0 / (alpha - 2.0);
    let tail = integrate(
        |s: f64| {
            if s <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            f(s.powf(-q)) * (q * s.powf(-q - 1.0))
        },
        0.0,
        1.0,
        opts,
    )?;
    Ok(head.value + tail.value)
}

/// Characteristic function sampled at `ω_k = k·h`, `k = 0 … len−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MgfGrid {
    pub step: f64,
    pub values: Vec<Complex64>,
    /// `E[ln μ]`.
    pub mean_log: f64,
}

/// Resolution of the FFT evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FftSpec {
    /// Frequency step `h`. The jump variable is resolved on `[0, 2π/h)`.
    pub step: f64,
    pub len: usize,
}

impl Default for FftSpec {
    fn default() -> Self {
        Self { step: 0.1, len: 1 << 15 }
    }
}

/// Fourier weight of piecewise-linear interpolation, `2(1 − cos x)/x²`.
fn linear_weight(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 12.0
    } else {
        2.0 * (1.0 - x.cos()) / (x * x)
    }
}

/// Evaluates the characteristic function at `count` grid frequencies.
///
/// With `N(ℓ)` the measure of normalized positions at which an interferer
/// shrinks `μ` by more than a factor `e^{−ℓ}`,
/// `ln E[μ^{jω}] = −jωθr^α/ρ − jω ∫₀^∞ e^{−jωℓ} N(ℓ) dℓ`. Near 0, `N`
/// behaves like `c ℓ^{−δ}`; the term `c ℓ^{−δ} e^{−ℓ}` is transformed
/// exactly and only the bounded remainder goes through the FFT.
pub fn mgf_grid(
    cfg: &ValidatedConfig,
    marks: &MarkDistribution,
    spec: FftSpec,
    count: usize,
) -> Result<MgfGrid, AnalysisError> {
    if count > spec.len / 2 {
        return Err(AnalysisError::Domain("requested frequencies exceed the FFT Nyquist range".into()));
    }
    let delta = cfg.delta();
    let scale = cfg.interference_scale();
    let nz = cfg.noise_exponent();
    let n = spec.len;
    let dl = std::f64::consts::TAU / spec.step / n as f64;
    let c = scale * marks.moment_real(delta);
    let lmax: Vec<f64> = marks
        .marks
        .iter()
        .map(|&a| if a >= 1.0 { f64::INFINITY } else { -(-a).ln_1p() })
        .collect();

    let mut reg = vec![Complex64::new(0.0, 0.0); n];
    if scale > 0.0 {
        par::fill_indexed(&mut reg, |m| {
            if m == 0 {
                return Complex64::new(0.0, 0.0);
            }
            let l = m as f64 * dl;
            let denom = -(-l).exp_m1();
            let mut s = 0.0;
            for ((&a, &w), &top) in marks.marks.iter().zip(&marks.masses).zip(&lmax) {
                if l < top {
                    let x = a / denom - 1.0;
                    if x > 0.0 {
                        s += w * x.powf(delta);
                    }
                }
            }
            Complex64::new(scale * s - c * l.powf(-delta) * (-l).exp(), 0.0)
        });
        FftPlanner::new().plan_fft_forward(n).process(&mut reg);
    }
    let g = gamma(1.0 - delta);
    let transform = |k: usize| {
        let w = k as f64 * spec.step;
        let singular = Complex64::new(1.0, w).powf(delta - 1.0) * (c * g);
        reg[k] * (dl * linear_weight(w * dl)) + singular
    };
    let values = (0..count)
        .map(|k| {
            let jw = Complex64::new(0.0, k as f64 * spec.step);
            (-jw * nz - jw * transform(k)).exp()
        })
        .collect();
    Ok(MgfGrid {
        step: spec.step,
        values,
        mean_log: -nz - transform(0).re,
    })
}
