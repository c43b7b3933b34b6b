use std::collections::HashMap;

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::cayley::BallTable;
use crate::error::{Error, Result};
use crate::group::Letter;

use super::{certify, CertificationReport, Edge, GeodesicAutomaton, Meta};

type Deltas = SmallVec<[i32; 2]>;
type Children = SmallVec<[(Letter, u32); 8]>;

#[derive(Clone, Debug)]
pub struct BuildOutcome {
    pub automaton: GeodesicAutomaton,
    pub report: CertificationReport,
}

/// Shortlex normal-form tree: the children of `x` are the normal forms
/// `xs`, for elements at levels below `depth`.
fn normal_form_tree(ball: &BallTable, depth: usize) -> Vec<Children> {
    let base = ball.base();
    let rws = &base.fixture.metric(base.metric).rws;
    let gens = rws.letters();
    let inner = ball.ball_size(depth - 1).unwrap();
    (0..inner)
        .into_par_iter()
        .map(|id| {
            let x = ball.word(id);
            gens.iter()
                .filter_map(|&s| {
                    let y = rws.normalize_append(x, s);
                    (y.len() == x.len() + 1 && y[..x.len()] == x[..]).then(|| {
                        let child = ball.id_of_normal_form(&y).expect("child inside ball");
                        (s, child as u32)
                    })
                })
                .collect()
        })
        .collect()
}

/// Radius-`k` cone signatures of every element at level `≤ depth - k`:
/// two elements share a signature when their normal-form subtrees to
/// depth k coincide, together with all target-length increments.
pub fn cone_signatures(ball: &BallTable, k: usize, depth: usize) -> Result<Vec<u32>> {
    let tree = normal_form_tree(ball, depth);
    Ok(signatures(ball, &tree, k, depth))
}

fn deltas(targets: &[&[u32]], x: usize, y: usize) -> Deltas {
    targets
        .iter()
        .map(|t| t[y] as i32 - t[x] as i32)
        .collect()
}

fn signatures(ball: &BallTable, tree: &[Children], k: usize, depth: usize) -> Vec<u32> {
    let names: Vec<&str> = ball.registered().collect();
    let targets: Vec<&[u32]> = names.iter().map(|n| ball.target_lengths(n).unwrap()).collect();
    let mut sig = vec![0u32; ball.ball_size(depth).unwrap()];
    for j in 1..=k {
        let live = ball.ball_size(depth - j).unwrap();
        let keys: Vec<Vec<(Letter, Deltas, u32)>> = (0..live)
            .into_par_iter()
            .map(|x| {
                tree[x]
                    .iter()
                    .map(|&(s, y)| (s, deltas(&targets, x, y as usize), sig[y as usize]))
                    .collect()
            })
            .collect();
        let mut intern: HashMap<Vec<(Letter, Deltas, u32)>, u32> = HashMap::new();
        let mut next = vec![u32::MAX; sig.len()];
        for (x, key) in keys.into_iter().enumerate() {
            let fresh = intern.len() as u32;
            next[x] = *intern.entry(key).or_insert(fresh);
        }
        sig = next;
    }
    sig
}

/// Builds an automaton whose states are radius-`k` cone types of the base
/// ball (refined by target-length increments), minimises it, and certifies
/// it to `depth`. The ball must have radius `≥ depth` and carry the target
/// metrics that become the edge weights.
pub fn build_cone_automaton(ball: &BallTable, k: usize, depth: usize) -> Result<BuildOutcome> {
    if k == 0 {
        return Err(Error::Invalid("cone radius must be at least 1".into()));
    }
    if depth < k + 2 {
        return Err(Error::Invalid(format!(
            "horizon {depth} must be at least cone radius + 2 = {}",
            k + 2
        )));
    }
    if depth > ball.radius() {
        return Err(Error::Horizon {
            what: "cone automaton horizon".into(),
            needed: depth,
            available: ball.radius(),
        });
    }
    let base = ball.base();
    let alpha = base.fixture.alphabet();
    let names: Vec<String> = ball.registered().map(String::from).collect();
    let targets: Vec<&[u32]> = names.iter().map(|n| ball.target_lengths(n).unwrap()).collect();
    let tree = normal_form_tree(ball, depth);
    let sig = signatures(ball, &tree, k, depth);

    // Transitions between cone types, read off representatives strictly
    // inside the region where child signatures are known.
    let top = depth - k;
    let classes = sig[..ball.ball_size(top)?].iter().max().map_or(0, |&m| m as usize + 1);
    let mut rep: Vec<Option<usize>> = vec![None; classes];
    let mut trans: Vec<Vec<(Letter, u32, Deltas)>> = vec![Vec::new(); classes];
    for x in 0..ball.ball_size(top - 1)? {
        let c = sig[x] as usize;
        let row: Vec<(Letter, u32, Deltas)> = tree[x]
            .iter()
            .map(|&(s, y)| (s, sig[y as usize], deltas(&targets, x, y as usize)))
            .collect();
        match rep[c] {
            None => {
                rep[c] = Some(x);
                trans[c] = row;
            }
            Some(r) if trans[c] != row => {
                let (s, _, _) = row
                    .iter()
                    .zip(&trans[c])
                    .find(|(u, v)| u != v)
                    .map(|(u, _)| u.clone())
                    .unwrap_or_else(|| row[0].clone());
                return Err(Error::ConeInconsistent {
                    radius: k,
                    detail: format!(
                        "`{}` and `{}` share a cone type but their `{}`-successors differ",
                        alpha.render(ball.word(r)),
                        alpha.render(ball.word(x)),
                        alpha.symbol(s)
                    ),
                });
            }
            Some(_) => {}
        }
    }
    if let Some(c) = rep.iter().position(|r| r.is_none()) {
        let x = sig[..ball.ball_size(top)?]
            .iter()
            .position(|&s| s as usize == c)
            .unwrap();
        return Err(Error::ConeInconsistent {
            radius: k,
            detail: format!(
                "cone type of `{}` first appears at level {top}; raise the horizon",
                alpha.render(ball.word(x))
            ),
        });
    }

    let (blocks, block_of) = minimise(&trans);
    let initial = block_of[sig[0] as usize];
    let mut edges = Vec::new();
    for (b, members) in blocks.iter().enumerate() {
        for (s, t, w) in &trans[members[0]] {
            edges.push(Edge {
                from: b,
                to: block_of[*t as usize],
                label: alpha.symbol(*s),
                weights: w.iter().map(|&d| d as i64).collect(),
            });
        }
    }
    let gens: Vec<char> = base.generators().iter().map(|&l| alpha.symbol(l)).collect();
    let meta = Meta {
        fixture: Some(base.fixture.name.clone()),
        fixture_hash: Some(base.fixture.hash.clone()),
        base: Some(base.name().to_string()),
        certified_depth: None,
        source: format!("cone types of radius {k}"),
    };
    let automaton = GeodesicAutomaton::new(blocks.len(), initial, gens, names, edges, meta)?.canonical();
    let report = certify(&automaton, ball, depth)?;
    let mut automaton = automaton;
    if report.passed() {
        automaton.meta.certified_depth = Some(depth);
    }
    Ok(BuildOutcome { automaton, report })
}

/// Moore partition refinement of a deterministic machine whose edges carry
/// outputs (the weights). Returns the blocks and the block of each state.
fn minimise(trans: &[Vec<(Letter, u32, Deltas)>]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let n = trans.len();
    let mut block_of = vec![0usize; n];
    let mut count = 0;
    loop {
        let mut intern: HashMap<(usize, Vec<(Letter, usize, Deltas)>), usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for c in 0..n {
            let key = (
                block_of[c],
                trans[c]
                    .iter()
                    .map(|(s, t, w)| (*s, block_of[*t as usize], w.clone()))
                    .collect(),
            );
            let fresh = intern.len();
            next[c] = *intern.entry(key).or_insert(fresh);
        }
        let stable = intern.len() == count;
        count = intern.len();
        block_of = next;
        if stable {
            break;
        }
    }
    let mut blocks = vec![Vec::new(); count];
    for (c, &b) in block_of.iter().enumerate() {
        blocks[b].push(c);
    }
    (blocks, block_of)
}
