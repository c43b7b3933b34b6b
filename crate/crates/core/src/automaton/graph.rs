use std::collections::VecDeque;

use num_integer::Integer;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::GeodesicAutomaton;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub states: Vec<usize>,
    /// Indices into the automaton's edge list, both ends inside.
    pub edges: Vec<usize>,
    /// gcd of cycle lengths; 0 for a trivial component.
    pub period: usize,
}

impl Component {
    /// Carries at least one cycle.
    pub fn is_nontrivial(&self) -> bool {
        !self.edges.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ComponentAnalysis {
    /// All SCCs, ordered by smallest state.
    pub components: Vec<Component>,
    pub component_of: Vec<usize>,
    /// Condensation DAG: successor components.
    pub condensation: Vec<Vec<usize>>,
    /// `reach[i][j]`: a directed path leads from component i to j (i ≠ j).
    pub reach: Vec<Vec<bool>>,
}

impl ComponentAnalysis {
    pub fn nontrivial(&self) -> impl Iterator<Item = (usize, &Component)> {
        self.components
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_nontrivial())
    }
}

pub fn analyze_graph(a: &GeodesicAutomaton) -> ComponentAnalysis {
    let mut g = DiGraph::<(), ()>::with_capacity(a.states, a.edges.len());
    let nodes: Vec<_> = (0..a.states).map(|_| g.add_node(())).collect();
    for e in &a.edges {
        g.add_edge(nodes[e.from], nodes[e.to], ());
    }
    let mut sccs: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            v.sort_unstable();
            v
        })
        .collect();
    sccs.sort();

    let mut component_of = vec![0; a.states];
    for (i, c) in sccs.iter().enumerate() {
        for &s in c {
            component_of[s] = i;
        }
    }
    let mut components: Vec<Component> = sccs
        .into_iter()
        .map(|states| Component {
            states,
            edges: Vec::new(),
            period: 0,
        })
        .collect();
    let mut condensation = vec![Vec::new(); components.len()];
    for (i, e) in a.edges.iter().enumerate() {
        let (cf, ct) = (component_of[e.from], component_of[e.to]);
        if cf == ct {
            components[cf].edges.push(i);
        } else if !condensation[cf].contains(&ct) {
            condensation[cf].push(ct);
        }
    }
    for succ in &mut condensation {
        succ.sort_unstable();
    }
    for c in &mut components {
        c.period = period(a, c);
    }

    let n = components.len();
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        let mut queue = VecDeque::from(condensation[i].clone());
        while let Some(j) = queue.pop_front() {
            if !row[j] {
                row[j] = true;
                queue.extend(condensation[j].iter().copied());
            }
        }
    }
    ComponentAnalysis {
        components,
        component_of,
        condensation,
        reach,
    }
}

/// gcd over component edges `u → v` of `level(u) + 1 - level(v)`, with
/// levels from a BFS inside the component.
fn period(a: &GeodesicAutomaton, c: &Component) -> usize {
    if c.edges.is_empty() {
        return 0;
    }
    let mut level = vec![None::<i64>; a.states];
    let root = c.states[0];
    level[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &i in &c.edges {
            let e = &a.edges[i];
            if e.from == u && level[e.to].is_none() {
                level[e.to] = Some(level[u].unwrap() + 1);
                queue.push_back(e.to);
            }
        }
    }
    c.edges
        .iter()
        .map(|&i| {
            let e = &a.edges[i];
            level[e.from].unwrap() + 1 - level[e.to].unwrap()
        })
        .fold(0i64, |g, d| g.gcd(&d)) as usize
}
