//! Undirected simple graphs and the random generators used as substrates.

use alloc::vec::Vec;
use rand::Rng;

use crate::error::{check_positive, check_probability, Error};
use crate::trials::rng_from_seed;
use crate::Result;

/// An undirected simple graph on nodes `0..node_count`.
///
/// Edges are stored once as `(u, v)` with `u < v`, sorted, with a CSR
/// adjacency alongside. Immutable after construction.
#[derive(Clone, Debug)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(u32, u32)>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.node_count == other.node_count && self.edges == other.edges
    }
}

impl Eq for Graph {}

/// What [`Graph::from_edges_lossy`] threw away.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Cleanup {
    pub duplicates: usize,
    pub self_loops: usize,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut list = Vec::new();
        for (a, b) in edges {
            check_node(a, node_count)?;
            check_node(b, node_count)?;
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            list.push(ordered(a, b));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0 as usize, w[0].1 as usize));
        }
        Ok(Graph::from_sorted(node_count, list))
    }

    /// Builds a graph, dropping self-loops and repeated edges and counting them.
    pub fn from_edges_lossy<I>(node_count: usize, edges: I) -> Result<(Graph, Cleanup)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut cleanup = Cleanup::default();
        let mut list = Vec::new();
        for (a, b) in edges {
            check_node(a, node_count)?;
            check_node(b, node_count)?;
            if a == b {
                cleanup.self_loops += 1;
            } else {
                list.push(ordered(a, b));
            }
        }
        list.sort_unstable();
        let before = list.len();
        list.dedup();
        cleanup.duplicates = before - list.len();
        Ok((Graph::from_sorted(node_count, list), cleanup))
    }

    fn from_sorted(node_count: usize, edges: Vec<(u32, u32)>) -> Graph {
        let mut degree = alloc::vec![0usize; node_count];
        for &(a, b) in &edges {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..node_count].to_vec();
        let mut neighbors = alloc::vec![0u32; 2 * edges.len()];
        for &(a, b) in &edges {
            neighbors[fill[a as usize]] = b;
            fill[a as usize] += 1;
            neighbors[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        Graph {
            node_count,
            edges,
            offsets,
            neighbors,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|&(a, b)| (a as usize, b as usize))
    }

    pub(crate) fn edge(&self, index: usize) -> (u32, u32) {
        self.edges[index]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbors[self.offsets[v]..self.offsets[v + 1]]
            .iter()
            .map(|&u| u as usize)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count).map(|v| self.degree(v)).collect()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        if a >= self.node_count || b >= self.node_count || a == b {
            return false;
        }
        self.edges.binary_search(&ordered(a, b)).is_ok()
    }

    /// Sizes of the connected components of the whole graph, largest first.
    pub fn component_sizes(&self) -> Vec<usize> {
        let mut uf = crate::union_find::UnionFind::default();
        uf.reset(self.node_count);
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        let mut sizes = Vec::new();
        for v in 0..self.node_count as u32 {
            if uf.find(v) == v {
                sizes.push(uf.size_of_root(v) as usize);
            }
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    pub fn is_connected(&self) -> bool {
        self.node_count > 0 && self.component_sizes().len() == 1
    }
}

fn ordered(a: usize, b: usize) -> (u32, u32) {
    if a < b {
        (a as u32, b as u32)
    } else {
        (b as u32, a as u32)
    }
}

fn check_node(v: usize, node_count: usize) -> Result<()> {
    if v < node_count {
        Ok(())
    } else {
        Err(Error::NodeOutOfRange { node: v, node_count })
    }
}

fn check_node_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n", "graph needs at least one node"));
    }
    if n > u32::MAX as usize {
        return Err(Error::param("n", "node ids are 32-bit"));
    }
    Ok(())
}

/// Erdős–Rényi `G(n, p)`: every one of the `n(n-1)/2` pairs independently.
pub fn generate_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    check_node_count(n)?;
    check_probability("p", p)?;
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i as u32, j as u32));
            }
        }
    }
    Ok(Graph::from_sorted(n, edges))
}

/// Power-law expected-degree weights `w_i = d (n / i)^(1/b)` for ranks `1..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeWeights {
    weights: Vec<f64>,
    min_degree: f64,
    scale: f64,
    total: f64,
}

impl NodeWeights {
    /// Weight of the node at 0-based index `v` (rank `v + 1`).
    pub fn weight(&self, v: usize) -> f64 {
        self.weights[v]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `d`, the minimum expected degree.
    pub fn min_degree(&self) -> f64 {
        self.min_degree
    }

    /// `b`, the power-law scale.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.scale
    }

    /// `ℓ_n`, the sum of all weights.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// `min(1, w_i w_j / ℓ_n)` for 0-based indices.
    pub fn edge_probability(&self, i: usize, j: usize) -> f64 {
        chung_lu_edge_probability(self.weights[i], self.weights[j], self.total)
    }
}

pub fn chung_lu_edge_probability(wi: f64, wj: f64, total: f64) -> f64 {
    let p = wi * wj / total;
    if p >= 1.0 {
        1.0
    } else {
        p
    }
}

pub fn chung_lu_weights(n: usize, d: f64, b: f64) -> Result<NodeWeights> {
    check_node_count(n)?;
    check_positive("d", d)?;
    check_positive("b", b)?;
    let beta = 1.0 / b;
    let nf = n as f64;
    let weights: Vec<f64> = (1..=n).map(|i| d * libm::pow(nf / i as f64, beta)).collect();
    let total = weights.iter().sum();
    Ok(NodeWeights {
        weights,
        min_degree: d,
        scale: b,
        total,
    })
}

/// Chung–Lu graph: pair `(i, j)`, `i < j`, present with `min(1, w_i w_j / ℓ_n)`.
/// Node `v` carries rank `v + 1`.
pub fn generate_chung_lu(weights: &NodeWeights, seed: u64) -> Graph {
    let n = weights.len();
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        let wi = weights.weights[i] / weights.total;
        for j in i + 1..n {
            let p = wi * weights.weights[j];
            if p >= 1.0 || rng.random::<f64>() < p {
                edges.push((i as u32, j as u32));
            }
        }
    }
    Graph::from_sorted(n, edges)
}
