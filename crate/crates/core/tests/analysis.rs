mod common;

use manhattan::analysis::{
    inverse_curve_check, ldp_rate_function, multifractal_spectrum, rigidity_report,
    write_rate_csv, Rate, RigidityThresholds, Spectrum, Verdict,
};
use manhattan::thermo::{ManhattanCurve, Provenance, Tolerances};
use manhattan::Error;

use common::*;

/// Minimum of a smooth convex function: dense grid then golden-section.
fn grid_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let n = 40_000;
    let step = (hi - lo) / n as f64;
    let best = (0..=n)
        .map(|i| lo + step * i as f64)
        .min_by(|x, y| f(*x).total_cmp(&f(*y)))
        .unwrap();
    let (mut a, mut b) = (best - step, best + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b))
}

fn sample(s: Spectrum) -> manhattan::analysis::SpectrumSample {
    match s {
        Spectrum::Sample(x) => x,
        Spectrum::OutOfRange => panic!("out of range"),
    }
}

#[test]
fn spectrum_peaks_at_the_mean_distortion() {
    let c = free_curve();
    let tau = c.mean_distortion().unwrap();
    let x = sample(multifractal_spectrum(&c, tau).unwrap());
    assert!((x.dimension - 4f64.ln()).abs() < 1e-9);
    assert!(x.attained_at_a.abs() < 1e-8);
    assert_eq!(multifractal_spectrum(&c, 2.1).unwrap(), Spectrum::OutOfRange);
    assert_eq!(multifractal_spectrum(&c, 0.9).unwrap(), Spectrum::OutOfRange);
}

#[test]
fn spectrum_matches_grid_oracle() {
    let c = free_curve();
    let x = sample(multifractal_spectrum(&c, 1.5).unwrap());
    let oracle = grid_min(|a| 1.5 * a + free_closed_form(a), -20.0, 20.0);
    assert!((x.dimension - oracle).abs() < 1e-8, "{} vs {oracle}", x.dimension);
}

#[test]
fn rate_function_matches_grid_oracle() {
    let c = free_curve();
    let r = ldp_rate_function(&c, 1.6).unwrap();
    // sup_t {ts - θ(-t)} = -inf_t {θ(-t) - ts}.
    let sup = -grid_min(|t| free_closed_form(-t) - 1.6 * t, -50.0, 50.0);
    let oracle = 4f64.ln() + sup;
    assert!((r.rate.value() - oracle).abs() < 1e-8, "{:?} vs {oracle}", r.rate);
    assert!(!r.endpoint);
}

#[test]
fn rate_function_zero_and_infinity() {
    let c = free_curve();
    let tau = c.mean_distortion().unwrap();
    let r = ldp_rate_function(&c, tau).unwrap();
    assert!(r.rate.value().abs() < 1e-10);
    assert_eq!(ldp_rate_function(&c, 2.5).unwrap().rate, Rate::Infinite);
    assert_eq!(ldp_rate_function(&c, 0.5).unwrap().rate, Rate::Infinite);
    for d in [1e-3, 1e-2] {
        assert!(ldp_rate_function(&c, tau + d).unwrap().rate.value() > 0.0);
        assert!(ldp_rate_function(&c, tau - d).unwrap().rate.value() > 0.0);
    }
}

#[test]
fn rate_function_endpoints_are_finite() {
    let c = free_curve();
    let lo = ldp_rate_function(&c, 1.0).unwrap();
    let hi = ldp_rate_function(&c, 2.0).unwrap();
    assert!(lo.endpoint && hi.endpoint);
    assert!((lo.rate.value() - 2f64.ln()).abs() < 1e-12);
    assert!((hi.rate.value() - 4f64.ln()).abs() < 1e-12);
    // Just inside, the values approach the endpoint limits.
    let near = ldp_rate_function(&c, 1.0 + 1e-6).unwrap().rate.value();
    assert!((near - 2f64.ln()).abs() < 1e-2);
}

#[test]
fn spectrum_concave_rate_convex_and_dual() {
    let c = free_curve();
    let v = 4f64.ln();
    let grid: Vec<f64> = (0..101).map(|i| 1.0 + 0.01 * i as f64).collect();
    let dims: Vec<f64> = grid.iter().map(|&a| sample(multifractal_spectrum(&c, a).unwrap()).dimension).collect();
    let rates: Vec<f64> = grid.iter().map(|&s| ldp_rate_function(&c, s).unwrap().rate.value()).collect();
    for i in 1..100 {
        assert!(dims[i] >= 0.5 * (dims[i - 1] + dims[i + 1]) - 1e-9, "α = {}", grid[i]);
        assert!(rates[i] <= 0.5 * (rates[i - 1] + rates[i + 1]) + 1e-9, "s = {}", grid[i]);
    }
    for (d, r) in dims.iter().zip(&rates) {
        assert!(*r >= 0.0 && *d <= v + 1e-9);
        assert!((r - (v - d)).abs() < 1e-8);
    }
}

#[test]
fn rigidity_verdicts() {
    let free = rigidity_report(&free_curve(), RigidityThresholds::default()).unwrap();
    assert_eq!(free.verdict, Verdict::NotRoughlySimilar);
    assert!(free.mean_distortion / free.growth_ratio > 1.0);

    let same = ManhattanCurve::new(letters_automaton().with_unit_weight("Sstar"), "Sstar", Tolerances::default()).unwrap();
    let r = rigidity_report(&same, RigidityThresholds::default()).unwrap();
    assert_eq!(r.verdict, Verdict::RoughlySimilar);
    assert!(r.straight_line && r.dilation_equal && r.roughly_similar);
    assert!((r.mean_distortion - 1.0).abs() < 1e-12 && (r.growth_ratio - 1.0).abs() < 1e-11);

    let tri = rigidity_report(&curve("triangle_334", "Sstar", "S", 10), RigidityThresholds::default()).unwrap();
    assert_eq!(tri.verdict, Verdict::NotRoughlySimilar);
    assert!(tri.theta_second_at_zero > 0.0);
}

#[test]
fn conflicting_signals_are_indeterminate() {
    let loose = RigidityThresholds { theta_second: 1.0 };
    let r = rigidity_report(&free_curve(), loose).unwrap();
    assert!(matches!(r.verdict, Verdict::Indeterminate(_)));
    assert!(!r.roughly_similar);
}

#[test]
fn swapped_curves_are_inverse() {
    let ab = free_curve();
    let ba = curve("free_f2", "S", "Sstar", 8);
    let grid: Vec<f64> = (0..41).map(|i| -2.0 + 0.1 * i as f64).collect();
    let d = inverse_curve_check(&ab, &ba, &grid).unwrap();
    assert!(d.max_deviation <= 1e-6, "{d:?}");
    assert!(d.slope_duality);
    assert!((d.tau_ab - 4.0 / 3.0).abs() < 1e-9);
    assert!(ba.theta(4f64.ln()).unwrap().value.abs() < 1e-8);
    assert!(matches!(inverse_curve_check(&ab, &ab, &grid), Err(Error::Invalid(_))));
}

#[test]
fn rate_csv_marks_infinity() {
    let c = free_curve();
    let rows: Vec<_> = [0.5, 1.0, 1.5, 2.0, 3.0].iter().map(|&s| ldp_rate_function(&c, s).unwrap()).collect();
    let mut out = Vec::new();
    write_rate_csv(&mut out, &Provenance::of(&c), &rows).unwrap();
    let text = String::from_utf8(out).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "s,I,attained_at_t");
    assert!(body[1].ends_with(",inf,"));
    assert!(body[2].ends_with(",-inf"));
    assert!(body[4].ends_with(",inf"));
    assert!(text.contains("endpoint (word-metric extension)"));
}
