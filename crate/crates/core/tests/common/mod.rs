//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use contagion_core::Graph;

/// Components by breadth-first search, each sorted, in order of their
/// smallest node.
pub fn bfs_components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Index into `comps` of the largest component, ties going to the one with
/// the smallest node.
pub fn giant_index(comps: &[Vec<usize>]) -> usize {
    let best = comps.iter().map(Vec::len).max().unwrap();
    comps.iter().position(|c| c.len() == best).unwrap()
}

/// Independent cascade replayed round by round: every newly active node
/// tries each neighbor once and succeeds on the edges marked live.
pub fn independent_cascade(n: usize, live: &[(usize, usize)], seeds: &[usize]) -> Vec<bool> {
    let mut active = vec![false; n];
    let mut frontier: Vec<usize> = Vec::new();
    for &s in seeds {
        if !active[s] {
            active[s] = true;
            frontier.push(s);
        }
    }
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &u in &frontier {
            for &(a, b) in live {
                let w = if a == u {
                    b
                } else if b == u {
                    a
                } else {
                    continue;
                };
                if !active[w] {
                    active[w] = true;
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    active
}

/// One (edge pattern, single seed) world with its probability.
#[derive(Clone, Debug)]
pub struct World {
    pub prob: f64,
    pub count: usize,
    pub giant_active: bool,
    pub active: Vec<bool>,
    pub in_giant: Vec<bool>,
}

/// Every triggering pattern of `g` at rate `q`, crossed with a uniformly
/// chosen single seed.
pub fn enumerate_worlds(g: &Graph, q: f64) -> Vec<World> {
    let n = g.node_count();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let m = edges.len();
    assert!(m <= 20, "too many edges to enumerate");
    let mut out = Vec::new();
    for mask in 0u32..(1 << m) {
        let live: Vec<(usize, usize)> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| edges[i]).collect();
        let k = live.len() as i32;
        let p_pattern = q.powi(k) * (1.0 - q).powi(m as i32 - k);
        if p_pattern == 0.0 {
            continue;
        }
        let comps = bfs_components(n, &live);
        let giant = &comps[giant_index(&comps)];
        let mut in_giant = vec![false; n];
        giant.iter().for_each(|&v| in_giant[v] = true);
        for s in 0..n {
            let active = independent_cascade(n, &live, &[s]);
            out.push(World {
                prob: p_pattern / n as f64,
                count: active.iter().filter(|&&a| a).count(),
                giant_active: in_giant[s],
                active,
                in_giant: in_giant.clone(),
            });
        }
    }
    out
}

/// Conditional law of a world statistic: `(value, probability)` sorted by value.
pub fn conditional_law(worlds: &[World], keep: impl Fn(&World) -> bool) -> Vec<(i64, f64)> {
    let mut mass = std::collections::BTreeMap::new();
    let mut total = 0.0;
    for w in worlds.iter().filter(|w| keep(w)) {
        *mass.entry(w.count as i64).or_insert(0.0) += w.prob;
        total += w.prob;
    }
    mass.into_iter().map(|(v, p)| (v, p / total)).collect()
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|v| (v - 1, v))).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).unwrap()
}
