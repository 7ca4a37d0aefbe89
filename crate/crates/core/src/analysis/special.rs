//! Interference integrals and the generalized binomial coefficient.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use super::quad::{integrate, QuadOptions};
use super::AnalysisError;

/// `∫₀^∞ (1 + v^{α/2})^{−k} dv = Γ(1+δ) Γ(k−δ) / Γ(k)` with `δ = 2/α`.
pub fn inner_integral_ck(alpha: f64, k: u32) -> Result<f64, AnalysisError> {
    check(alpha, k)?;
    let d = 2.0 / alpha;
    let k = k as f64;
    Ok((ln_gamma(1.0 + d) + ln_gamma(k - d) - ln_gamma(k)).exp())
}

/// The same integral by adaptive quadrature, used to cross-check the closed
/// form. `[0, 1]` is integrated directly; on `[1, ∞)` the substitution
/// `v = s^{−q}` with `q = 4/(α−2)` makes the integrand vanish smoothly at 0.
pub fn inner_integral_ck_quad(alpha: f64, k: u32) -> Result<f64, AnalysisError> {
    check(alpha, k)?;
    let h = 0.5 * alpha;
    let kf = k as f64;
    let opts = QuadOptions { rel_tol: 1e-13, abs_tol: 1e-15, ..Default::default() };
    let head = integrate(|v| (1.0 + v.powf(h)).powf(-kf), 0.0, 1.0, opts)?;
    let q = 4.0 / (alpha - 2.0);
    let tail = integrate(
        |s| {
            if s <= 0.0 {
                return 0.0;
            }
            let v = s.powf(-q);
            (1.0 + v.powf(h)).powf(-kf) * q * s.powf(-q - 1.0)
        },
        0.0,
        1.0,
        opts,
    )?;
    Ok(head.value + tail.value)
}

fn check(alpha: f64, k: u32) -> Result<(), AnalysisError> {
    if k == 0 {
        return Err(AnalysisError::Domain("k must be at least 1 (the k = 0 integral diverges)".into()));
    }
    if !(alpha > 2.0) {
        return Err(AnalysisError::Domain("alpha must exceed 2".into()));
    }
    Ok(())
}

/// Precomputed `C_1 … C_K`.
pub fn ck_table(alpha: f64, order: u32) -> Result<Vec<f64>, AnalysisError> {
    (1..=order).map(|k| inner_integral_ck(alpha, k)).collect()
}

/// `s (s−1) ⋯ (s−k+1) / k!`.
pub fn complex_binomial(s: Complex64, k: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for m in 0..k {
        acc *= (s - m as f64) / (m + 1) as f64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn known_values() {
        assert!((inner_integral_ck(4.0, 1).unwrap() - PI / 2.0).abs() < 1e-13);
        assert!((inner_integral_ck(4.0, 2).unwrap() - PI / 4.0).abs() < 1e-13);
        let d = 2.0 / 3.8;
        let c1 = inner_integral_ck(3.8, 1).unwrap();
        assert!((c1 - PI * d / (PI * d).sin()).abs() < 1e-12);
        assert!((c1 - 1.659).abs() < 1e-3);
    }

    #[test]
    fn zero_order_rejected() {
        assert!(inner_integral_ck(3.8, 0).is_err());
        assert!(inner_integral_ck(2.0, 1).is_err());
    }

    #[test]
    fn binomial_examples() {
        let j = Complex64::new(0.0, 1.0);
        assert_eq!(complex_binomial(Complex64::new(3.7, -2.0), 0), Complex64::new(1.0, 0.0));
        assert_eq!(complex_binomial(Complex64::new(0.0, 0.0), 3), Complex64::new(0.0, 0.0));
        let b = complex_binomial(j, 2);
        assert!((b - Complex64::new(-0.5, -0.5)).norm() < 1e-15);
        assert!((complex_binomial(Complex64::new(5.0, 0.0), 2).re - 10.0).abs() < 1e-12);
    }
}
