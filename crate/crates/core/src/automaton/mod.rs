//! Geodesic automata with integer edge weights: the JSON file format,
//! strongly connected components and periods, certification against the
//! Cayley-graph oracle, and construction from empirical cone types.

mod build;
mod certify;
mod graph;
mod io;

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub use build::{build_cone_automaton, cone_signatures, BuildOutcome};
pub use certify::{certify, CertificationReport, Check, Witness};
pub use graph::{analyze_graph, Component, ComponentAnalysis};
pub use io::{load_automaton, save_automaton};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: char,
    /// Aligned with [`GeodesicAutomaton::weight_names`].
    pub weights: Vec<i64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Meta {
    pub fixture: Option<String>,
    pub fixture_hash: Option<String>,
    pub base: Option<String>,
    pub certified_depth: Option<usize>,
    pub source: String,
}

/// Finite labelled digraph with an initial state whose paths from the
/// initial state code the group elements, one geodesic per element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicAutomaton {
    pub states: usize,
    pub initial: usize,
    pub alphabet: Vec<char>,
    pub weight_names: Vec<String>,
    pub edges: Vec<Edge>,
    pub meta: Meta,
}

impl GeodesicAutomaton {
    /// Validates and puts edges in canonical `(from, label, to)` order.
    pub fn new(
        states: usize,
        initial: usize,
        alphabet: Vec<char>,
        weight_names: Vec<String>,
        mut edges: Vec<Edge>,
        meta: Meta,
    ) -> Result<Self> {
        let pos = |c: char| alphabet.iter().position(|&a| a == c);
        edges.sort_by_key(|e| (e.from, pos(e.label), e.to));
        let a = GeodesicAutomaton {
            states,
            initial,
            alphabet,
            weight_names,
            edges,
            meta,
        };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Automaton(m));
        if self.states == 0 || self.initial >= self.states {
            return bad(format!("initial state {} out of range", self.initial));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.from >= self.states || e.to >= self.states {
                return bad(format!("edge {i} has an endpoint out of range"));
            }
            if !self.alphabet.contains(&e.label) {
                return bad(format!("edge {i} has label `{}` outside the alphabet", e.label));
            }
            if e.weights.len() != self.weight_names.len() {
                return bad(format!("edge {i} is missing a weight entry"));
            }
        }
        let dist = self.bfs_levels();
        if let Some(s) = dist.iter().position(|d| d.is_none()) {
            return bad(format!("state {s} is unreachable from the initial state"));
        }
        for w in 0..self.weight_names.len() {
            if let Some(s) = self.negative_prefix_state(w) {
                return bad(format!(
                    "weight `{}` has a negative running sum on a path to state {s}",
                    self.weight_names[w]
                ));
            }
        }
        Ok(())
    }

    /// Bellman–Ford from the initial state: a state reachable with a
    /// negative running sum (or through a negative cycle).
    fn negative_prefix_state(&self, w: usize) -> Option<usize> {
        let mut dist = vec![i64::MAX; self.states];
        dist[self.initial] = 0;
        for round in 0..=self.states {
            let mut changed = false;
            for e in &self.edges {
                if dist[e.from] == i64::MAX {
                    continue;
                }
                let d = dist[e.from] + e.weights[w];
                if d < dist[e.to] {
                    dist[e.to] = d;
                    changed = true;
                    if d < 0 || round == self.states {
                        return Some(e.to);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        None
    }

    pub fn bfs_levels(&self) -> Vec<Option<usize>> {
        let out = self.out_edges();
        let mut dist = vec![None; self.states];
        dist[self.initial] = Some(0);
        let mut queue = VecDeque::from([self.initial]);
        while let Some(u) = queue.pop_front() {
            for &e in &out[u] {
                let v = self.edges[e].to;
                if dist[v].is_none() {
                    dist[v] = Some(dist[u].unwrap() + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Edge indices leaving each state, in canonical order.
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.states];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.from].push(i);
        }
        out
    }

    pub fn weight_index(&self, name: &str) -> Result<usize> {
        self.weight_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Automaton(format!("automaton has no weight `{name}`")))
    }

    /// Number of accepted paths of each length `0..=n`.
    pub fn path_counts(&self, n: usize) -> Vec<u128> {
        let mut cur = vec![0u128; self.states];
        cur[self.initial] = 1;
        let mut counts = vec![1];
        for _ in 0..n {
            let mut next = vec![0u128; self.states];
            for e in &self.edges {
                next[e.to] += cur[e.from];
            }
            counts.push(next.iter().sum());
            cur = next;
        }
        counts
    }

    /// Copy with a single weight `name`: the constant-weight control uses
    /// the base length itself (every edge weighs 1).
    pub fn with_unit_weight(&self, name: &str) -> Self {
        let mut a = self.clone();
        a.weight_names = vec![name.to_string()];
        for e in &mut a.edges {
            e.weights = vec![1];
        }
        a
    }

    /// Renumbers states in BFS order from the initial state, visiting edges
    /// in canonical order. Two isomorphic automata relabel identically.
    pub fn canonical(&self) -> Self {
        let out = self.out_edges();
        let mut order = vec![usize::MAX; self.states];
        order[self.initial] = 0;
        let mut next = 1;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(u) = queue.pop_front() {
            for &e in &out[u] {
                let v = self.edges[e].to;
                if order[v] == usize::MAX {
                    order[v] = next;
                    next += 1;
                    queue.push_back(v);
                }
            }
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                from: order[e.from],
                to: order[e.to],
                ..e.clone()
            })
            .collect();
        GeodesicAutomaton::new(
            self.states,
            0,
            self.alphabet.clone(),
            self.weight_names.clone(),
            edges,
            self.meta.clone(),
        )
        .expect("relabelling preserves validity")
    }
}
