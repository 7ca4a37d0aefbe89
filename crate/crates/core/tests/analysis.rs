mod common;

use aoi_mesh::analysis::{
    analyze, inner_integral_ck, network_aoi, noise_limited_aoi, picard_solve, AnalysisError,
    AnalysisFlag, GridSpec, MarkDistribution, MgfContext, PicardOptions, SuccessCdf,
};
use aoi_mesh::analysis::mgf::closed_form_inverse_moment;
use aoi_mesh::analysis::special::inner_integral_ck_quad;
use aoi_mesh::meanfield::{solve_fixed_point, SolveOptions};
use aoi_mesh::rng::RunStreams;
use aoi_mesh::{sample_topology, NetworkConfig, ValidatedConfig};
use num_complex::Complex64;
use statrs::function::erf::erfc;
use std::f64::consts::SQRT_2;
use proptest::prelude::*;

use common::cfg;

/// Per-link mean-field solutions over `count` independent layouts.
///
/// At ξ = 1/2 and p = 1 a pair of almost coincident links has its fixed
/// point at μ ≈ 0 where the map has slope 1, and the residual only decays
/// like 1/k², hence the generous iteration cap.
fn meanfield_links(c: &ValidatedConfig, count: u64) -> (Vec<f64>, Vec<f64>) {
    let (mut mu, mut a) = (Vec::new(), Vec::new());
    let opts = SolveOptions { tol: 1e-6, max_iter: 5000 };
    for run in 0..count {
        let t = sample_topology(c, &mut RunStreams::new(c.cfg().seed, run).topology);
        let s = solve_fixed_point(&t, c, opts).unwrap();
        mu.extend(s.mu);
        a.extend(s.a);
    }
    (mu, a)
}

#[test]
fn ck_closed_form_matches_quadrature() {
    for alpha in [3.0, 3.8, 4.0, 5.0] {
        for k in 1..=30 {
            let closed = inner_integral_ck(alpha, k).unwrap();
            let quad = inner_integral_ck_quad(alpha, k).unwrap();
            assert!((closed / quad - 1.0).abs() <= 1e-8, "alpha={alpha} k={k}: {closed} vs {quad}");
        }
    }
}

#[test]
fn ck_at_alpha_four_is_half_pi_times_ratio() {
    // δ = 1/2: C_1 = Γ(3/2)Γ(1/2) = π/2
    assert!((inner_integral_ck(4.0, 1).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn characteristic_function_is_bounded(omega in -20.0f64..20.0, a in 0.01f64..=1.0, lambda in 0.0f64..0.1) {
        let c = cfg(lambda, 0.5, 1.0);
        let ctx = MgfContext::with_marks(&c, MarkDistribution::single(a), 30).unwrap();
        let m = ctx.eval(omega).unwrap();
        prop_assert!(m.norm() <= 1.0 + 1e-12);
        let back = ctx.eval(-omega).unwrap();
        prop_assert!((back - m.conj()).norm() < 1e-9);
    }

    #[test]
    fn series_and_quadrature_agree_when_the_series_has_converged(omega in 0.05f64..3.0, a in 0.05f64..0.6) {
        let c = cfg(5e-2, 0.5, 1.0);
        let ctx = MgfContext::with_marks(&c, MarkDistribution::single(a), 30).unwrap();
        let s = ctx.eval_series(omega);
        prop_assume!(!s.tail_exceeded);
        prop_assert!((s.value - ctx.eval(omega).unwrap()).norm() < 1e-7);
    }
}

#[test]
fn characteristic_function_at_zero_is_one() {
    let ctx = MgfContext::with_marks(&cfg(3e-2, 0.5, 1.0), MarkDistribution::single(0.4), 30).unwrap();
    assert_eq!(ctx.eval(0.0).unwrap(), Complex64::new(1.0, 0.0));
}

/// The typical link's `E[μ^{jω}]` against the empirical average over links
/// of many mean-field solved layouts, with the interferer marks taken from
/// the same solutions.
#[test]
fn characteristic_function_matches_meanfield_population() {
    let c = cfg(1e-2, 0.5, 1.0);
    let (mu, a) = meanfield_links(&c, 50);
    assert!(mu.len() > 20_000);
    let n = mu.len() as f64;
    let marks = MarkDistribution::from_weighted(a.iter().map(|&x| (x, 1.0 / n)));
    let ctx = MgfContext::with_marks(&c, marks, 30).unwrap();
    for omega in [0.5, 1.0, 2.0] {
        let emp: Complex64 = mu.iter().map(|&m| Complex64::new(0.0, omega * m.ln()).exp()).sum::<Complex64>() / n;
        let model = ctx.eval(omega).unwrap();
        assert!((emp - model).norm() < 0.02, "omega={omega}: {emp} vs {model}");
    }
}

/// The inverted CDF is that of `ln μ + σZ`. At this density most links
/// have `ln μ` within one bandwidth of 0, so the mean-field sample is given
/// the same Gaussian blur before the two are compared.
#[test]
fn fixed_point_distribution_matches_meanfield_population() {
    let c = NetworkConfig { lambda: 5e-2, xi: 0.5, window: 60.0, ..Default::default() }.validate().unwrap();
    let (mu, _) = meanfield_links(&c, 200);
    let sol = picard_solve(&c, &PicardOptions::default()).unwrap();
    let sigma = sol.cdf.bandwidth();
    let logs: Vec<f64> = mu.iter().map(|m| m.ln()).collect();
    let mut d: f64 = 0.0;
    for (t, f) in sol.cdf.grid().iter().zip(sol.cdf.values()).step_by(2) {
        let y = t.ln();
        let emp = logs.iter().map(|l| 0.5 * erfc((l - y) / (sigma * SQRT_2))).sum::<f64>() / logs.len() as f64;
        d = d.max((emp - f).abs());
    }
    assert!(d <= 0.05, "Kolmogorov distance {d} over {} links", mu.len());
}

#[test]
fn saturated_sources_need_two_inversions() {
    let c = cfg(3e-2, 1.0, 0.6);
    let sol = picard_solve(&c, &PicardOptions::default()).unwrap();
    assert_eq!(sol.iterations, 2);
    assert_eq!(sol.history, vec![0.0]);
    assert_eq!(sol.marks, MarkDistribution::single(0.6));
}

#[test]
fn picard_contracts_at_moderate_density() {
    let sol = picard_solve(&cfg(3e-2, 0.5, 1.0), &PicardOptions::default()).unwrap();
    let h = &sol.history;
    assert!(h.len() <= 50 && *h.last().unwrap() < 1e-6, "{h:?}");
    for w in h.windows(2).skip(2) {
        assert!(w[1] < w[0], "{h:?}");
    }
}

#[test]
fn fixed_point_cdf_is_a_distribution() {
    let sol = picard_solve(&cfg(5e-2, 0.3, 0.7), &PicardOptions::default()).unwrap();
    let v = sol.cdf.values();
    assert!(v.windows(2).all(|w| w[1] >= w[0]));
    assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
    assert!(sol.cdf.mass_above_grid() < 1e-6);
    assert!(sol.cdf.mass_below_grid() < 1e-3);
}

#[test]
fn near_empty_network_reduces_to_noise_limited_link() {
    for &(xi, p) in &[(0.25, 0.5), (0.5, 1.0), (1.0, 0.5)] {
        let c = cfg(1e-9, xi, p);
        let est = analyze(&c, &PicardOptions::default()).unwrap().aoi.unwrap();
        let want = noise_limited_aoi(&c);
        assert!((est.value / want - 1.0).abs() < 1e-6, "xi={xi} p={p}: {} vs {want}", est.value);
        assert!(est.flags.is_empty());
    }
    let c = NetworkConfig { lambda: 1e-9, xi: 1.0, p: 1.0, noise: 1e-30, ..Default::default() }.validate().unwrap();
    assert!((noise_limited_aoi(&c) - 1.0).abs() < 1e-15);
}

/// With every interferer always on, `E[1/μ]` is infinite. The grid value is
/// still reported, flagged, and grows as the grid reaches further down.
#[test]
fn saturated_aloha_free_network_is_flagged_divergent() {
    let c = cfg(1e-2, 1.0, 1.0);
    let est = analyze(&c, &PicardOptions::default()).unwrap().aoi.unwrap();
    assert!(est.flags.contains(&AnalysisFlag::DivergenceSuspected));
    assert!(est.closed_form_inverse_moment.is_infinite());
    let deeper = PicardOptions { grid: GridSpec { t_min: 1e-6, ..GridSpec::default() }, ..PicardOptions::default() };
    let est2 = analyze(&c, &deeper).unwrap().aoi.unwrap();
    assert!(est2.value > est.value * 1.1, "{} vs {}", est2.value, est.value);
    let fine = analyze(&cfg(1e-2, 0.9, 1.0), &PicardOptions::default()).unwrap().aoi.unwrap();
    assert!(!fine.flags.contains(&AnalysisFlag::DivergenceSuspected));
}

#[test]
fn inverse_moment_agrees_with_closed_form() {
    let c = cfg(5e-2, 0.5, 1.0);
    let sol = picard_solve(&c, &PicardOptions::default()).unwrap();
    let est = network_aoi(&c, &sol.cdf).unwrap();
    assert!((est.inverse_moment / est.closed_form_inverse_moment - 1.0).abs() < 1e-3, "{est:?}");
    let direct = closed_form_inverse_moment(&c, &sol.marks);
    assert!((direct / est.closed_form_inverse_moment - 1.0).abs() < 1e-3);
}

#[test]
fn stochastically_smaller_success_means_older() {
    let c = cfg(1e-2, 0.5, 1.0);
    let grid = GridSpec::default().abscissae();
    let base: Vec<f64> = grid.iter().map(|&t| ((t - 0.5) / 0.3).clamp(0.0, 1.0)).collect();
    let worse: Vec<f64> = grid.iter().map(|&t| ((t - 0.4) / 0.3).clamp(0.0, 1.0)).collect();
    let a = network_aoi(&c, &SuccessCdf::new(grid.clone(), base, 0.0).unwrap()).unwrap();
    let b = network_aoi(&c, &SuccessCdf::new(grid, worse, 0.0).unwrap()).unwrap();
    assert!(b.value > a.value, "{} <= {}", b.value, a.value);
}

#[test]
fn mass_below_grid_is_flagged_then_refused() {
    let c = cfg(1e-2, 0.5, 1.0);
    let grid = GridSpec::default().abscissae();
    let with_lump = |lump: f64| {
        let v: Vec<f64> = grid.iter().map(|&t| if t >= 0.8 { 1.0 } else { lump }).collect();
        SuccessCdf::new(grid.clone(), v, 0.0).unwrap()
    };
    assert!(network_aoi(&c, &with_lump(0.0)).unwrap().flags.is_empty());
    assert_eq!(network_aoi(&c, &with_lump(0.05)).unwrap().flags, vec![AnalysisFlag::MassBelowGrid]);
    assert!(matches!(network_aoi(&c, &with_lump(0.2)), Err(AnalysisError::DivergenceSuspected { .. })));
}

#[test]
fn cdf_eval_interpolates_and_is_zero_below_grid() {
    let grid = vec![0.1, 0.2, 0.4];
    let cdf = SuccessCdf::new(grid, vec![0.0, 0.5, 1.0], 0.0).unwrap();
    assert_eq!(cdf.eval(0.05), 0.0);
    assert_eq!(cdf.eval(0.2), 0.5);
    assert!((cdf.eval(0.2 * 2f64.sqrt()) - 0.75).abs() < 1e-12);
    assert_eq!(cdf.eval(0.9), 1.0);
    assert!(SuccessCdf::new(vec![0.1, 0.2], vec![0.6, 0.5], 0.0).is_err());
}
