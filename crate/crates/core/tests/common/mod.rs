#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use manhattan::cayley::MetricContext;
use manhattan::group::{GroupFixture, Word};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> Arc<GroupFixture> {
    let path = fixture_dir().join(format!("{name}.fix"));
    Arc::new(GroupFixture::load(&path).expect("fixture loads"))
}

pub fn metric(fixture: &Arc<GroupFixture>, name: &str) -> MetricContext {
    MetricContext::new(fixture.clone(), name).unwrap()
}

pub fn word(fixture: &GroupFixture, text: &str) -> Word {
    fixture.alphabet().parse_word(text).unwrap()
}

/// Free reduction over a, b with inverses as negative ids: the oracle for
/// elements of F2 independent of any rewriting system.
pub fn free_reduce(word: &[i8]) -> Vec<i8> {
    let mut out: Vec<i8> = Vec::new();
    for &x in word {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// S* letters of the free fixture as reduced words over a = 1, b = 2.
pub fn free_sstar_images() -> Vec<Vec<i8>> {
    vec![
        vec![1],
        vec![2],
        vec![1, 2],
        vec![-1],
        vec![-2],
        vec![-2, -1],
    ]
}

use manhattan::automaton::{build_cone_automaton, load_automaton, GeodesicAutomaton};
use manhattan::cayley::BallTable;
use manhattan::thermo::{ManhattanCurve, Tolerances};

/// Cone automaton of `base` weighted by `target`, certified to `depth`.
pub fn built_automaton(fixture_name: &str, base: &str, target: &str, depth: usize) -> GeodesicAutomaton {
    let f = fixture(fixture_name);
    let mut ball = BallTable::build(&metric(&f, base), depth).unwrap();
    ball.register(&metric(&f, target)).unwrap();
    (1..=depth - 2)
        .find_map(|k| build_cone_automaton(&ball, k, depth).ok().filter(|o| o.report.passed()))
        .expect("some cone radius certifies")
        .automaton
}

pub fn curve(fixture_name: &str, base: &str, target: &str, depth: usize) -> ManhattanCurve {
    ManhattanCurve::new(built_automaton(fixture_name, base, target, depth), target, Tolerances::default()).unwrap()
}

pub fn free_curve() -> ManhattanCurve {
    curve("free_f2", "Sstar", "S", 6)
}

pub fn letters_automaton() -> GeodesicAutomaton {
    load_automaton(&fixture_dir().join("automata/free_f2_Sstar_letters.json")).unwrap()
}

/// log(½e^{-a}(e^{-a} + √(e^{-a}(e^{-a}+8)) + 4)).
pub fn free_closed_form(a: f64) -> f64 {
    let s = (-a).exp();
    (0.5 * s * (s + (s * (s + 8.0)).sqrt() + 4.0)).ln()
}
