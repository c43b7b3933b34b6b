use std::fmt;

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::cayley::BallTable;
use crate::error::{Error, Result};
use crate::group::{Letter, Word};

use super::GeodesicAutomaton;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    /// Paths of length n versus elements of the base sphere of radius n.
    Bijection,
    /// The label word of a path is a base geodesic.
    Geodesic,
    /// Weight sum along a path versus the target length of its endpoint.
    Weight(String),
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Bijection => write!(f, "bijection"),
            Check::Geodesic => write!(f, "geodesic"),
            Check::Weight(w) => write!(f, "weight {w}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub check: Check,
    pub depth: usize,
    /// Label word of the offending path (or the missed element).
    pub word: String,
    /// Edge indices of the path; empty when an element has no path.
    pub edges: Vec<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificationReport {
    /// Deepest level examined; equals the requested depth on success.
    pub depth: usize,
    pub bijection_ok: bool,
    pub geodesic_ok: bool,
    pub weights_ok: bool,
    pub witness: Option<Witness>,
    /// Paths per length, `0..=depth`.
    pub path_counts: Vec<usize>,
}

impl CertificationReport {
    pub fn passed(&self) -> bool {
        self.bijection_ok && self.geodesic_ok && self.weights_ok
    }

    pub fn into_result(self) -> Result<Self> {
        match &self.witness {
            None => Ok(self),
            Some(w) => Err(Error::Certification {
                depth: w.depth,
                check: w.check.to_string(),
                witness: format!("{} ({})", w.word, w.detail),
            }),
        }
    }
}

struct PathState {
    state: usize,
    nf: Word,
    labels: Word,
    edges: SmallVec<[u32; 16]>,
    sums: SmallVec<[i64; 2]>,
}

enum Binding<'a> {
    Base,
    Target(&'a [u32]),
}

/// Checks, for every `n ≤ depth`, that accepted paths of length n are in
/// bijection with the base sphere of radius n via their label words, that
/// those words are geodesic, and that every weight sums to the target
/// length of the endpoint. Stops at the first failing level.
pub fn certify(a: &GeodesicAutomaton, ball: &BallTable, depth: usize) -> Result<CertificationReport> {
    if depth > ball.radius() {
        return Err(Error::Horizon {
            what: "certification depth".into(),
            needed: depth,
            available: ball.radius(),
        });
    }
    let base = ball.base();
    let fixture = &base.fixture;
    if let Some(h) = &a.meta.fixture_hash {
        if *h != fixture.hash {
            return Err(Error::Automaton(format!(
                "automaton was built for fixture hash {h}, not {}",
                fixture.hash
            )));
        }
    }
    let alpha = fixture.alphabet();
    let rws = &fixture.metric(base.metric).rws;
    let letters: Vec<Letter> = a
        .edges
        .iter()
        .map(|e| {
            alpha
                .letter(e.label)
                .filter(|&l| rws.contains_letter(l))
                .ok_or_else(|| {
                    Error::Automaton(format!(
                        "label `{}` is not a generator of {}",
                        e.label,
                        base.name()
                    ))
                })
        })
        .collect::<Result<_>>()?;
    let bindings: Vec<Binding> = a
        .weight_names
        .iter()
        .map(|w| {
            if w == base.name() && ball.target_lengths(w).is_err() {
                Ok(Binding::Base)
            } else {
                ball.target_lengths(w).map(Binding::Target)
            }
        })
        .collect::<Result<_>>()?;
    let out = a.out_edges();

    let mut report = CertificationReport {
        depth: 0,
        bijection_ok: true,
        geodesic_ok: true,
        weights_ok: true,
        witness: None,
        path_counts: vec![1],
    };
    let mut frontier = vec![PathState {
        state: a.initial,
        nf: Word::new(),
        labels: Word::new(),
        edges: SmallVec::new(),
        sums: SmallVec::from_elem(0, a.weight_names.len()),
    }];

    let (letters, out) = (&letters, &out);
    for n in 1..=depth {
        let next: Vec<PathState> = frontier
            .par_iter()
            .flat_map_iter(|p| {
                out[p.state].iter().map(move |&i| {
                    let e = &a.edges[i];
                    let mut labels = p.labels.clone();
                    labels.push(letters[i]);
                    let mut edges = p.edges.clone();
                    edges.push(i as u32);
                    PathState {
                        state: e.to,
                        nf: rws.normalize_append(&p.nf, letters[i]),
                        labels,
                        edges,
                        sums: p.sums.iter().zip(&e.weights).map(|(s, w)| s + w).collect(),
                    }
                })
            })
            .collect();
        report.depth = n;
        report.path_counts.push(next.len());

        let sphere = ball.sphere_ids(n);
        let mut hit = vec![false; sphere.len()];
        let mut witness: Option<Witness> = None;
        let mut note = |report: &mut CertificationReport, check: Check, p: &PathState, detail: String| {
            match check {
                Check::Bijection => report.bijection_ok = false,
                Check::Geodesic => report.geodesic_ok = false,
                Check::Weight(_) => report.weights_ok = false,
            }
            if witness.is_none() {
                witness = Some(Witness {
                    check,
                    depth: n,
                    word: alpha.render(&p.labels),
                    edges: p.edges.iter().map(|&e| e as usize).collect(),
                    detail,
                });
            }
        };
        for p in &next {
            if p.nf.len() != n {
                let detail = format!("base length {} < {n}", p.nf.len());
                note(&mut report, Check::Geodesic, p, detail);
                continue;
            }
            let id = ball
                .id_of_normal_form(&p.nf)
                .expect("geodesic endpoint lies in the sphere");
            if std::mem::replace(&mut hit[id - sphere.start], true) {
                let detail = format!("second path to {}", alpha.render(&p.nf));
                note(&mut report, Check::Bijection, p, detail);
            }
            for (w, b) in bindings.iter().enumerate() {
                let expected = match b {
                    Binding::Base => n as i64,
                    Binding::Target(l) => l[id] as i64,
                };
                if p.sums[w] != expected {
                    let detail = format!("weight sum {} but length {expected}", p.sums[w]);
                    note(&mut report, Check::Weight(a.weight_names[w].clone()), p, detail);
                }
            }
        }
        if let Some(missing) = hit.iter().position(|&h| !h) {
            report.bijection_ok = false;
            if witness.is_none() {
                let nf = ball.word(sphere.start + missing);
                witness = Some(Witness {
                    check: Check::Bijection,
                    depth: n,
                    word: alpha.render(nf),
                    edges: Vec::new(),
                    detail: format!("{} paths for {} elements; element has no path", next.len(), sphere.len()),
                });
            }
        }
        if witness.is_some() {
            report.witness = witness;
            return Ok(report);
        }
        frontier = next;
    }
    Ok(report)
}
