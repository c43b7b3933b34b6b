use num_rational::Ratio;

/// A weighted edge of a strongly connected graph on states `0..n`.
#[derive(Clone, Copy, Debug)]
pub struct WEdge {
    pub from: usize,
    pub to: usize,
    pub weight: i64,
}

/// Minimum cycle mean with a witness cycle (indices into the edge slice).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeanCycle {
    pub value: Ratio<i64>,
    pub cycle: Vec<usize>,
}

/// Karp's minimum mean cycle for a strongly connected graph, in exact
/// integer arithmetic. The witness is any cycle among the critical edges,
/// so its mean is exactly the minimum.
pub fn min_mean_cycle(n: usize, edges: &[WEdge]) -> Option<MeanCycle> {
    if edges.is_empty() {
        return None;
    }
    // d[k][v]: least weight of a walk with exactly k edges from state 0.
    let mut d = vec![vec![None::<i64>; n]; n + 1];
    d[0][0] = Some(0);
    for k in 1..=n {
        for e in edges {
            if let Some(x) = d[k - 1][e.from] {
                let y = x + e.weight;
                if d[k][e.to].is_none_or(|z| y < z) {
                    d[k][e.to] = Some(y);
                }
            }
        }
    }
    let mut best: Option<Ratio<i64>> = None;
    for v in 0..n {
        let Some(dn) = d[n][v] else { continue };
        let worst = (0..n)
            .filter_map(|k| d[k][v].map(|dk| Ratio::new(dn - dk, (n - k) as i64)))
            .max();
        if let Some(w) = worst {
            if best.is_none_or(|b| w < b) {
                best = Some(w);
            }
        }
    }
    let value = best?;
    let tight = critical_edges(n, edges, value);
    let cycle = find_cycle(n, edges, &tight)?;
    debug_assert_eq!(
        Ratio::new(cycle.iter().map(|&i| edges[i].weight).sum::<i64>(), cycle.len() as i64),
        value
    );
    Some(MeanCycle { value, cycle })
}

pub fn max_mean_cycle(n: usize, edges: &[WEdge]) -> Option<MeanCycle> {
    let neg: Vec<WEdge> = edges
        .iter()
        .map(|e| WEdge { weight: -e.weight, ..*e })
        .collect();
    min_mean_cycle(n, &neg).map(|m| MeanCycle {
        value: -m.value,
        cycle: m.cycle,
    })
}

/// Some directed cycle using only edges from `allowed`, as edge indices in
/// walk order starting from the smallest edge index on it.
pub fn find_cycle(n: usize, edges: &[WEdge], allowed: &[usize]) -> Option<Vec<usize>> {
    let mut out = vec![Vec::new(); n];
    for &i in allowed {
        out[edges[i].from].push(i);
    }
    // Iterative DFS with colours: 0 new, 1 on stack, 2 done.
    let mut colour = vec![0u8; n];
    let mut via = vec![usize::MAX; n];
    for root in 0..n {
        if colour[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        colour[root] = 1;
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if *next < out[u].len() {
                let e = out[u][*next];
                *next += 1;
                let v = edges[e].to;
                match colour[v] {
                    0 => {
                        colour[v] = 1;
                        via[v] = e;
                        stack.push((v, 0));
                    }
                    1 => {
                        let mut cycle = vec![e];
                        let mut w = u;
                        while w != v {
                            cycle.push(via[w]);
                            w = edges[via[w]].from;
                        }
                        cycle.reverse();
                        let start = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap();
                        cycle.rotate_left(start);
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                colour[u] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// Tight edges for the minimum mean `value`: reduced weights `q·w - p` are
/// shifted by Bellman–Ford potentials from a virtual source (no negative
/// cycles since `p/q` is minimal) and the zero edges kept. Every cycle
/// among them attains `value`.
pub fn critical_edges(n: usize, edges: &[WEdge], value: Ratio<i64>) -> Vec<usize> {
    let (p, q) = (*value.numer(), *value.denom());
    let reduced: Vec<i64> = edges.iter().map(|e| q * e.weight - p).collect();
    let mut pot = vec![0i64; n];
    for _ in 0..n {
        for (e, &r) in edges.iter().zip(&reduced) {
            if pot[e.from] + r < pot[e.to] {
                pot[e.to] = pot[e.from] + r;
            }
        }
    }
    (0..edges.len())
        .filter(|&i| pot[edges[i].from] + reduced[i] == pot[edges[i].to])
        .collect()
}
