use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::ManhattanCurve;

/// Edge involution of a component induced by a label flip.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeInvolution {
    /// Local edge index → local edge index.
    pub image: Vec<usize>,
    /// Orbits, each sorted, ordered by smallest member.
    pub orbits: Vec<Vec<usize>>,
}

fn flip(pairs: &[(char, char)], x: char) -> char {
    for &(p, q) in pairs {
        if x == p {
            return q;
        }
        if x == q {
            return p;
        }
    }
    x
}

/// Quotient of a component's transfer matrix at `a` by the edge
/// involution that a label flip (e.g. c↔C, a↔B, b↔A) induces on the
/// automaton. The state permutation is found by propagation from the
/// initial state; the flip must preserve edges and weights.
pub fn flip_quotient(
    curve: &ManhattanCurve,
    component: usize,
    pairs: &[(char, char)],
    a: f64,
) -> Result<(DMatrix<f64>, EdgeInvolution)> {
    let aut = &curve.automaton;
    let w = aut.weight_index(&curve.weight)?;
    let out = aut.out_edges();
    let not_sym = |m: String| Error::Invalid(format!("label flip is not a symmetry: {m}"));

    let mut sigma = vec![usize::MAX; aut.states];
    let mut edge_image = vec![usize::MAX; aut.edges.len()];
    sigma[aut.initial] = aut.initial;
    let mut queue = VecDeque::from([aut.initial]);
    while let Some(u) = queue.pop_front() {
        for &e in &out[u] {
            let x = &aut.edges[e];
            let label = flip(pairs, x.label);
            let cands: Vec<usize> = out[sigma[u]]
                .iter()
                .copied()
                .filter(|&f| aut.edges[f].label == label)
                .collect();
            let [f] = cands[..] else {
                return Err(not_sym(format!("state {} has {} `{label}`-edges", sigma[u], cands.len())));
            };
            let y = &aut.edges[f];
            if y.weights[w] != x.weights[w] {
                return Err(not_sym(format!("edge {e} and its image {f} have different weights")));
            }
            edge_image[e] = f;
            if sigma[x.to] == usize::MAX {
                sigma[x.to] = y.to;
                queue.push_back(x.to);
            } else if sigma[x.to] != y.to {
                return Err(not_sym(format!("state {} has two images", x.to)));
            }
        }
    }

    let c = curve.component(component);
    let local_of = |e: usize| c.edges.iter().position(|&x| x == e);
    let image: Vec<usize> = c
        .edges
        .iter()
        .map(|&e| local_of(edge_image[e]).ok_or_else(|| not_sym(format!("edge {e} leaves the component"))))
        .collect::<Result<_>>()?;
    if image.iter().enumerate().any(|(i, &j)| image[j] != i) {
        return Err(not_sym("the edge map is not an involution".into()));
    }
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..image.len() {
        if i <= image[i] {
            let mut o = vec![i, image[i]];
            o.dedup();
            orbits.push(o);
        }
    }

    let m = c.matrix(a, 0.0);
    let k = orbits.len();
    let q = DMatrix::from_fn(k, k, |r, s| orbits[s].iter().map(|&j| m[(orbits[r][0], j)]).sum());
    Ok((q, EdgeInvolution { image, orbits }))
}
