mod common;

use std::collections::HashSet;

use manhattan::automaton::{Edge, GeodesicAutomaton, Meta};
use manhattan::thermo::{
    flip_quotient, max_mean_cycle, min_mean_cycle, perron, spectral_radius, write_curve_csv,
    ManhattanCurve, Provenance, Tolerances, WEdge,
};
use manhattan::Error;
use nalgebra::DMatrix;
use num_rational::Ratio;
use proptest::prelude::*;

use common::*;

fn chain(states: usize, edges: &[(usize, usize, char, i64)]) -> GeodesicAutomaton {
    let mut alphabet: Vec<char> = edges.iter().map(|e| e.2).collect();
    alphabet.sort();
    alphabet.dedup();
    GeodesicAutomaton::new(
        states,
        0,
        alphabet,
        vec!["w".into()],
        edges
            .iter()
            .map(|&(from, to, label, w)| Edge { from, to, label, weights: vec![w] })
            .collect(),
        Meta::default(),
    )
    .unwrap()
}

#[test]
fn perron_small_cases() {
    let m = DMatrix::from_element(1, 1, (-0.7f64 * 3.0).exp());
    let p = perron(&m, 1e-14).unwrap();
    assert!((p.lambda - (-2.1f64).exp()).abs() < 1e-15);
    // Periodic: the plain power iteration would oscillate.
    let m = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 0.5, 0.0]);
    let p = perron(&m, 1e-14).unwrap();
    assert!((p.lambda - 1.0).abs() < 1e-13);
    assert!((p.left.dot(&p.right) - 1.0).abs() < 1e-13);
    assert!(p.residual < 1e-12);
}

#[test]
fn perron_rejects_reducible_zero_row() {
    let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 0.0]);
    assert!(matches!(perron(&m, 1e-12), Err(Error::Numerical(_))));
}

#[test]
fn free_curve_matches_closed_form() {
    let c = free_curve();
    let letters = ManhattanCurve::new(letters_automaton(), "S", Tolerances::default()).unwrap();
    for a in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 5.0] {
        let exact = free_closed_form(a);
        assert!((c.theta(a).unwrap().value - exact).abs() < 1e-12, "a = {a}");
        assert!((letters.theta(a).unwrap().value - exact).abs() < 1e-12, "a = {a}");
    }
    assert!(c.theta(3f64.ln()).unwrap().value.abs() < 1e-13);
    let scc = c.components[0].id;
    assert!((c.pressure_component(scc, 0.0).unwrap() - 4f64.ln()).abs() < 1e-13);
    assert_eq!(c.components[0].size(), 12);
}

#[test]
fn free_invariants() {
    let c = free_curve();
    assert!((c.mean_distortion().unwrap() - 4.0 / 3.0).abs() < 1e-12);
    let g = c.growth_rates().unwrap();
    assert!((g.v - 4f64.ln()).abs() < 1e-12);
    assert!((g.v_star - 3f64.ln()).abs() < 1e-11);
    let d = c.dilation().unwrap();
    assert_eq!(d.alpha_min.value, Ratio::from_integer(1));
    assert_eq!(d.alpha_max.value, Ratio::from_integer(2));
    for cm in [&d.alpha_min, &d.alpha_max] {
        let sum: i64 = cm.cycle.iter().map(|&e| c.automaton.edges[e].weights[0]).sum();
        assert_eq!(Ratio::new(sum, cm.cycle.len() as i64), cm.value);
        // Witness is a closed walk.
        for w in cm.cycle.windows(2) {
            assert_eq!(c.automaton.edges[w[0]].to, c.automaton.edges[w[1]].from);
        }
    }
}

#[test]
fn derivatives_match_closed_form_and_differences() {
    let c = free_curve();
    for a in [-1.0, 0.0, 0.7, 3.0] {
        let d = c.derivatives(a).unwrap();
        let h = 1e-5;
        let fd1 = (free_closed_form(a + h) - free_closed_form(a - h)) / (2.0 * h);
        let fd2 = (free_closed_form(a + h) - 2.0 * free_closed_form(a) + free_closed_form(a - h)) / (h * h);
        assert!((d.theta_prime - fd1).abs() < 1e-8, "a = {a}");
        assert!((d.theta_second - fd2).abs() < 1e-4, "a = {a}");
        let rich = c.theta_second_by_differences(a).unwrap();
        assert!((d.theta_second - rich).abs() < 1e-7, "a = {a}: {} vs {rich}", d.theta_second);
    }
}

#[test]
fn single_loop_is_affine() {
    let c = ManhattanCurve::new(chain(2, &[(0, 1, 'a', 3), (1, 1, 'a', 3)]), "w", Tolerances::default()).unwrap();
    for a in [-2.0, 0.0, 1.5] {
        let d = c.derivatives(a).unwrap();
        assert!((d.theta + 3.0 * a).abs() < 1e-13);
        assert!((d.theta_prime + 3.0).abs() < 1e-13);
        assert!(d.theta_second.abs() < 1e-13);
    }
    let d = c.dilation().unwrap();
    assert_eq!((d.alpha_min.value, d.alpha_max.value), (Ratio::from_integer(3), Ratio::from_integer(3)));
}

#[test]
fn constant_weight_is_a_straight_line() {
    let a = letters_automaton().with_unit_weight("Sstar");
    let c = ManhattanCurve::new(a, "Sstar", Tolerances::default()).unwrap();
    for x in [-3.0, -1.0, 0.0, 0.5, 2.0, 4.0] {
        let d = c.derivatives(x).unwrap();
        assert!((d.theta - (4f64.ln() - x)).abs() < 1e-12);
        assert!((d.theta_prime + 1.0).abs() < 1e-12);
        assert!(d.theta_second.abs() < 1e-12, "θ″({x}) = {}", d.theta_second);
    }
}

#[test]
fn semisimplicity_violation_is_reported() {
    // Two loops of equal weight, the first leading to the second.
    let a = chain(3, &[(0, 1, 'a', 1), (1, 1, 'a', 1), (1, 2, 'b', 1), (2, 2, 'b', 1)]);
    let c = ManhattanCurve::new(a, "w", Tolerances::default()).unwrap();
    assert!(matches!(c.theta(0.3), Err(Error::NotSemisimple(m)) if m.len() == 2));
    assert!(!c.theta_unchecked(0.3).unwrap().semisimple);
}

#[test]
fn derivative_spread_is_reported() {
    // Two unrelated loops tie at a = 0 with different slopes.
    let a = chain(3, &[(0, 1, 'a', 1), (1, 1, 'a', 1), (0, 2, 'b', 2), (2, 2, 'b', 2)]);
    let c = ManhattanCurve::new(a, "w", Tolerances::default()).unwrap();
    assert_eq!(c.theta(0.0).unwrap().maximal.len(), 2);
    assert!(matches!(c.derivatives(0.0), Err(Error::Numerical(m)) if m.contains("disagree")));
    assert_eq!(c.theta(1.0).unwrap().maximal.len(), 1);
}

#[test]
fn finite_automaton_is_rejected() {
    let a = chain(2, &[(0, 1, 'a', 1)]);
    assert!(matches!(ManhattanCurve::new(a, "w", Tolerances::default()), Err(Error::Invalid(_))));
}

#[test]
fn free_asymptotes() {
    let c = free_curve();
    let lim = c.asymptote_limits().unwrap();
    assert!((lim.at_plus_infinity - 2f64.ln()).abs() < 1e-12, "{lim:?}");
    assert!(lim.at_minus_infinity.abs() < 1e-12);
    let rho = c.log_adjacency_radius().unwrap();
    assert!((rho - 4f64.ln()).abs() < 1e-13);
    let g = c.asymptote_gap(10.0).unwrap();
    let gap = g.gap_min.unwrap();
    assert!((0.0..=rho).contains(&gap));
    assert!((gap - (free_closed_form(10.0) + 10.0)).abs() < 1e-10);
    // The gap approaches log 2 like √(2e^{-t})/2.
    assert!((gap - 2f64.ln()).abs() < 1e-2);
    assert!(g.gap_max.is_none());
}

#[test]
fn convexity_and_slope_bracketing() {
    for c in [free_curve(), curve("triangle_334", "Sstar", "S", 10)] {
        let d = c.dilation().unwrap();
        let (lo, hi) = (
            *d.alpha_min.value.numer() as f64 / *d.alpha_min.value.denom() as f64,
            *d.alpha_max.value.numer() as f64 / *d.alpha_max.value.denom() as f64,
        );
        let grid: Vec<f64> = (0..101).map(|i| -5.0 + 0.1 * i as f64).collect();
        let rows = c.evaluate_grid(&grid).unwrap();
        for w in rows.windows(3) {
            assert!(w[1].theta <= 0.5 * (w[0].theta + w[2].theta) + 1e-10);
            assert!(w[1].theta_prime >= w[0].theta_prime - 1e-12);
        }
        for r in &rows {
            assert!(lo - 1e-9 <= -r.theta_prime && -r.theta_prime <= hi + 1e-9);
        }
    }
}

#[test]
fn flip_quotient_preserves_the_spectral_radius() {
    let c = free_curve();
    let pairs = [('c', 'C'), ('a', 'B'), ('b', 'A')];
    let id = c.components[0].id;
    // The label-indexed 6×6 matrix printed for this example, s = e^{-a}.
    let printed_matrix = |s: f64| {
        let s2 = s * s;
        DMatrix::from_row_slice(6, 6, &[
            s, 0.0, s2, 0.0, s, s2,
            s, s, s2, s, 0.0, 0.0,
            s, s, s2, s, 0.0, 0.0,
            0.0, s, 0.0, s, s, s2,
            s, 0.0, s2, 0.0, s, s2,
            0.0, s, 0.0, s, s, s2,
        ])
    };
    for a in [-1.0, 0.0, 0.5, 2.0] {
        let (q, inv) = flip_quotient(&c, id, &pairs, a).unwrap();
        assert_eq!(inv.orbits.len(), 6);
        let full = perron(&c.transfer_matrix(id, a), 1e-14).unwrap().lambda;
        let small = perron(&q, 1e-14).unwrap().lambda;
        let printed = perron(&printed_matrix((-a).exp()), 1e-14).unwrap().lambda;
        assert!((full - small).abs() <= 1e-10 * full);
        assert!((full - printed).abs() <= 1e-10 * full);
    }
    assert!(flip_quotient(&c, id, &[('a', 'b')], 0.0).is_err());
}

#[test]
fn triangle_growth_rates() {
    let c = curve("triangle_334", "Sstar", "S", 10);
    let g = c.growth_rates().unwrap();
    assert!((g.v - 0.732858).abs() < 1e-4, "v = {}", g.v);
    assert!((g.v_star - 0.674756).abs() < 1e-4, "v* = {}", g.v_star);
    let tau = c.mean_distortion().unwrap();
    assert!(tau >= g.v / g.v_star);
    let rich = c.theta_second_by_differences(0.0).unwrap();
    assert!((c.derivatives(0.0).unwrap().theta_second - rich).abs() < 1e-7);
}

#[test]
fn csv_is_deterministic_across_worker_counts() {
    let c = free_curve();
    let grid: Vec<f64> = (0..121).map(|i| -3.0 + 0.05 * i as f64).collect();
    let render = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let rows = pool.install(|| c.evaluate_grid(&grid)).unwrap();
        let mut out = Vec::new();
        write_curve_csv(&mut out, &Provenance::of(&c), &rows).unwrap();
        String::from_utf8(out).unwrap()
    };
    let one = render(1);
    assert_eq!(one, render(4));
    assert!(one.contains("\na,theta,theta_prime,theta_second,n_maximal_components\n"));
    assert!(one.lines().any(|l| l.starts_with("# fixture_sha256: ")));
    let zero = one.lines().find(|l| l.starts_with("0.0000000000000000e0,")).unwrap();
    let theta: f64 = zero.split(',').nth(1).unwrap().parse().unwrap();
    assert!((theta - 4f64.ln()).abs() < 1e-14);
}

/// Brute-force cycle means: every simple cycle by DFS from its smallest state.
fn brute_cycle_means(n: usize, edges: &[WEdge]) -> HashSet<Ratio<i64>> {
    fn go(start: usize, u: usize, sum: i64, len: i64, seen: &mut Vec<bool>, edges: &[WEdge], out: &mut HashSet<Ratio<i64>>) {
        for e in edges.iter().filter(|e| e.from == u) {
            if e.to == start {
                out.insert(Ratio::new(sum + e.weight, len + 1));
            } else if e.to > start && !seen[e.to] {
                seen[e.to] = true;
                go(start, e.to, sum + e.weight, len + 1, seen, edges, out);
                seen[e.to] = false;
            }
        }
    }
    let mut out = HashSet::new();
    for s in 0..n {
        let mut seen = vec![false; n];
        seen[s] = true;
        go(s, s, 0, 0, &mut seen, edges, &mut out);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn karp_matches_cycle_enumeration(
        extra in proptest::collection::vec((0usize..5, 0usize..5, -3i64..6), 0..10),
        ring in proptest::collection::vec(-3i64..6, 5),
    ) {
        // A ring keeps the graph strongly connected.
        let n = 5;
        let mut edges: Vec<WEdge> = (0..n).map(|i| WEdge { from: i, to: (i + 1) % n, weight: ring[i] }).collect();
        edges.extend(extra.iter().map(|&(from, to, weight)| WEdge { from, to, weight }));
        let means = brute_cycle_means(n, &edges);
        let lo = min_mean_cycle(n, &edges).unwrap();
        let hi = max_mean_cycle(n, &edges).unwrap();
        prop_assert_eq!(lo.value, *means.iter().min().unwrap());
        prop_assert_eq!(hi.value, *means.iter().max().unwrap());
        for m in [&lo, &hi] {
            let s: i64 = m.cycle.iter().map(|&i| edges[i].weight).sum();
            prop_assert_eq!(Ratio::new(s, m.cycle.len() as i64), m.value);
        }
    }

    #[test]
    fn perron_matches_dense_eigensolver(entries in proptest::collection::vec(0.0f64..3.0, 16)) {
        let mut m = DMatrix::from_row_slice(4, 4, &entries);
        for i in 0..4 { m[(i, (i + 1) % 4)] += 0.5; }
        let p = perron(&m, 1e-13).unwrap();
        let (lo, hi) = p.bracket;
        prop_assert!(hi - lo <= 2e-13 * p.lambda);
        prop_assert!(lo <= p.lambda * (1.0 + 1e-15) && p.lambda <= hi * (1.0 + 1e-15));
        prop_assert!((p.lambda - spectral_radius(&m)).abs() < 1e-9 * p.lambda);
        prop_assert!(p.right.iter().all(|&x| x > 0.0) && p.left.iter().all(|&x| x > 0.0));
    }
}

#[test]
fn perron_handles_widely_spread_entries() {
    // Entries spanning ~20 orders of magnitude, unshifted: both far below
    // and far above 1.
    let c = curve("triangle_334", "Sstar", "S", 10);
    let id = c.components[0].id;
    for t in [-50.0, -20.0, 20.0, 50.0] {
        let m = c.transfer_matrix(id, t);
        let p = perron(&m, 1e-14).unwrap();
        assert!(p.bracket.1 - p.bracket.0 <= 2e-14 * p.lambda, "t = {t}");
        let want = c.theta(t).unwrap().value;
        assert!((p.lambda.ln() - want).abs() < 1e-12 * want.abs().max(1.0), "t = {t}");
    }
}
