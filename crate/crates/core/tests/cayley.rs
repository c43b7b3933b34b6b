mod common;

use std::collections::HashSet;

use manhattan::cayley::{
    ball_average_distortion, gromov_product, log_sphere_sum, read_snapshot,
    translation_length_estimate, write_snapshot, BallTable,
};
use manhattan::Error;
use num_rational::Ratio;
use proptest::prelude::*;

use common::*;

/// Elements of F2 at S*-distance exactly n, by substitution and free
/// reduction of every S*-word of length ≤ n.
fn sstar_sphere_oracle(n: usize) -> usize {
    let images = free_sstar_images();
    let mut seen: HashSet<Vec<i8>> = HashSet::from([vec![]]);
    let mut frontier = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for g in &frontier {
            for s in &images {
                let mut w: Vec<i8> = g.clone();
                w.extend_from_slice(s);
                let r = free_reduce(&w);
                if seen.insert(r.clone()) {
                    next.push(r);
                }
            }
        }
        frontier = next;
    }
    frontier.len()
}

#[test]
fn free_s_spheres() {
    let f = fixture("free_f2");
    let ball = BallTable::build(&metric(&f, "S"), 4).unwrap();
    let sizes: Vec<usize> = (0..=4).map(|n| ball.sphere_size(n).unwrap()).collect();
    assert_eq!(sizes, vec![1, 4, 12, 36, 108]);
}

#[test]
fn free_sstar_spheres_match_substitution_oracle() {
    let f = fixture("free_f2");
    let ball = BallTable::build(&metric(&f, "Sstar"), 5).unwrap();
    assert_eq!(ball.sphere_size(1).unwrap(), 6);
    assert_eq!(ball.sphere_size(2).unwrap(), 24);
    for n in 0..=5 {
        assert_eq!(ball.sphere_size(n).unwrap(), sstar_sphere_oracle(n), "n = {n}");
    }
}

#[test]
fn sphere_beyond_horizon_is_an_error() {
    let f = fixture("free_f2");
    let ball = BallTable::build(&metric(&f, "S"), 2).unwrap();
    assert!(matches!(ball.sphere(3), Err(Error::Horizon { .. })));
    let far = word(&f, "a5");
    assert!(matches!(ball.metric_length("S", &far), Err(Error::Horizon { .. })));
}

#[test]
fn registered_lengths_agree_with_substitution() {
    let f = fixture("free_f2");
    let mut ball = BallTable::build(&metric(&f, "Sstar"), 4).unwrap();
    ball.register(&metric(&f, "S")).unwrap();
    let images = free_sstar_images();
    let alpha = f.alphabet();
    let lengths = ball.target_lengths("S").unwrap();
    for (id, w) in ball.words().iter().enumerate() {
        let sub: Vec<i8> = w
            .iter()
            .flat_map(|&l| images[alpha_index(alpha.symbol(l))].clone())
            .collect();
        assert_eq!(free_reduce(&sub).len(), lengths[id] as usize);
    }
}

fn alpha_index(c: char) -> usize {
    "abcABC".find(c).unwrap()
}

#[test]
fn distortion_at_radius_one() {
    let f = fixture("free_f2");
    let mut ball = BallTable::build(&metric(&f, "Sstar"), 1).unwrap();
    ball.register(&metric(&f, "S")).unwrap();
    // 1 + 1 + 2 + 1 + 1 + 2 over 7 elements.
    assert_eq!(ball_average_distortion(&ball, "S", 1).unwrap(), Ratio::new(8, 7));
    assert_eq!(ball_average_distortion(&ball, "S", 0).unwrap(), Ratio::from_integer(0));
}

#[test]
fn distortion_approaches_growth_ratio() {
    let f = fixture("free_f2");
    let mut ball = BallTable::build(&metric(&f, "Sstar"), 10).unwrap();
    ball.register(&metric(&f, "S")).unwrap();
    let tau = ball_average_distortion(&ball, "S", 10).unwrap();
    let tau = *tau.numer() as f64 / *tau.denom() as f64;
    let ratio = 4f64.ln() / 3f64.ln();
    assert!(tau >= ratio - 0.05, "tau = {tau}");
}

#[test]
fn sphere_sum_at_zero_counts_the_sphere() {
    let f = fixture("free_f2");
    let mut ball = BallTable::build(&metric(&f, "Sstar"), 3).unwrap();
    ball.register(&metric(&f, "S")).unwrap();
    let s = log_sphere_sum(&ball, "S", 0.0, 3).unwrap();
    assert!((s - 96f64.ln()).abs() < 1e-12);
    // Large a is dominated by the shortest target lengths.
    let s = log_sphere_sum(&ball, "S", 400.0, 3).unwrap();
    assert!(s.is_finite());
}

#[test]
fn gromov_products() {
    let f = fixture("free_f2");
    let s = metric(&f, "S");
    assert_eq!(gromov_product(&s, &word(&f, "ab"), &word(&f, "aB")).unwrap(), Ratio::from_integer(1));
    assert_eq!(gromov_product(&s, &word(&f, "ab"), &word(&f, "ba")).unwrap(), Ratio::from_integer(0));
    let sstar = metric(&f, "Sstar");
    // |c| = 1, |a| = 1, |c⁻¹a| = |B| = 1.
    assert_eq!(gromov_product(&sstar, &word(&f, "c"), &word(&f, "a")).unwrap(), Ratio::new(1, 2));
}

#[test]
fn translation_lengths() {
    let f = fixture("free_f2");
    let s = metric(&f, "S");
    // Cyclically reduced: translation length equals |x|.
    let est = translation_length_estimate(&s, &word(&f, "bab"), 8).unwrap();
    assert_eq!(est.power_lengths[..3], [3, 6, 9]);
    assert_eq!(est.gromov, Ratio::from_integer(3));
    // Conjugate of a: translation length 1 though |x| = 3.
    let est = translation_length_estimate(&s, &word(&f, "baB"), 8).unwrap();
    assert_eq!(est.power_lengths[..3], [3, 4, 5]);
    assert_eq!(est.gromov, Ratio::from_integer(1));
    assert_eq!(est.point, Ratio::new(10, 8));
    let sstar = metric(&f, "Sstar");
    let est = translation_length_estimate(&sstar, &word(&f, "ab"), 6).unwrap();
    assert_eq!(est.upper, Ratio::from_integer(1));
}

#[test]
fn snapshot_roundtrip() {
    let f = fixture("free_f2");
    let mut ball = BallTable::build(&metric(&f, "Sstar"), 3).unwrap();
    ball.register(&metric(&f, "S")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ball.txt");
    write_snapshot(&ball, &path).unwrap();
    let back = read_snapshot(f.clone(), &path).unwrap();
    assert_eq!(back.radius(), 3);
    assert_eq!(back.words(), ball.words());
    assert_eq!(back.target_lengths("S").unwrap(), ball.target_lengths("S").unwrap());
}

#[test]
fn triangle_spheres_grow() {
    let f = fixture("triangle_334");
    let mut ball = BallTable::build(&metric(&f, "Sstar"), 6).unwrap();
    ball.register(&metric(&f, "S")).unwrap();
    assert_eq!(ball.sphere_size(1).unwrap(), 7);
    let lengths = ball.target_lengths("S").unwrap();
    let d = ball.id_of(&word(&f, "d")).unwrap().unwrap();
    assert_eq!(lengths[d], 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_is_symmetric(w in proptest::collection::vec(0u8..6, 0..12)) {
        let f = fixture("free_f2");
        let s = metric(&f, "Sstar");
        let w: Vec<_> = w.into_iter().map(manhattan::group::Letter).collect();
        let inv = f.alphabet().invert(&w);
        prop_assert_eq!(s.length(&w).unwrap(), s.length(&inv).unwrap());
    }

    #[test]
    fn sphere_membership_matches_length(n in 0usize..5, pick in 0usize..1000) {
        let f = fixture("triangle_334");
        let base = metric(&f, "S");
        let ball = BallTable::build(&base, 4).unwrap();
        let sphere = ball.sphere(n).unwrap();
        let w = &sphere[pick % sphere.len()];
        prop_assert_eq!(base.length(w).unwrap(), n);
        prop_assert_eq!(ball.metric_length("S", w).unwrap(), n);
    }

    #[test]
    fn power_lengths_are_subadditive(w in proptest::collection::vec(0u8..6, 1..6)) {
        let f = fixture("free_f2");
        let s = metric(&f, "Sstar");
        let w: Vec<_> = w.into_iter().map(manhattan::group::Letter).collect();
        let est = translation_length_estimate(&s, &w, 6).unwrap();
        let l = &est.power_lengths;
        for i in 0..l.len() {
            for j in 0..l.len() {
                if i + j + 1 < l.len() {
                    prop_assert!(l[i + j + 1] <= l[i] + l[j]);
                }
            }
        }
        prop_assert!(est.upper <= est.point);
    }
}
