//! Triggering sets (bond percolation), their components, and the cascades and
//! Monte Carlo estimates built on them.
//!
//! Under independent cascade with one coin per undirected edge, a node is
//! active iff its component in the retained subgraph contains a seed. Every
//! simulation here uses that equivalence instead of stepping the cascade.

use alloc::vec::Vec;
use rand::seq::index;
use rand::Rng;

use crate::distribution::EmpiricalDistribution;
use crate::error::{check_rate, Branch, Error};
use crate::graph::Graph;
use crate::trials::{fold_trials, map_trials, rng_from_seed, TrialRng};
use crate::union_find::UnionFind;
use crate::Result;

/// How seed sets are drawn in each trial.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SeedPolicy {
    /// Uniform over all `s`-subsets.
    #[default]
    Uniform,
    /// Successive sampling without replacement, proportional to degree.
    /// Isolated nodes are only drawn once every positive-degree node is taken.
    DegreeWeighted,
}

/// Transmission rate, seed count and seed policy of a cascade experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CascadeParams {
    pub q: f64,
    pub seed_count: usize,
    pub seed_policy: SeedPolicy,
}

impl CascadeParams {
    pub fn new(q: f64, seed_count: usize) -> Self {
        CascadeParams {
            q,
            seed_count,
            seed_policy: SeedPolicy::Uniform,
        }
    }

    pub fn with_policy(mut self, policy: SeedPolicy) -> Self {
        self.seed_policy = policy;
        self
    }

    fn validate(&self, g: &Graph) -> Result<()> {
        check_rate(self.q)?;
        check_seed_count(g.node_count(), self.seed_count)
    }
}

fn check_seed_count(n: usize, s: usize) -> Result<()> {
    if s == 0 {
        return Err(Error::param("s", "seed count must be positive"));
    }
    if s > n {
        return Err(Error::param("s", alloc::format!("{s} seeds requested from {n} nodes")));
    }
    Ok(())
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        Err(Error::param("trials", "need at least one trial"))
    } else {
        Ok(())
    }
}

/// The subgraph `H` of retained edges.
#[derive(Clone, Debug)]
pub struct TriggeringSet<'g> {
    graph: &'g Graph,
    retained: Vec<u32>,
    q: f64,
}

impl<'g> TriggeringSet<'g> {
    /// Builds a triggering set from explicit edge indices into `graph.edges()`.
    pub fn from_retained(graph: &'g Graph, q: f64, mut edge_indices: Vec<usize>) -> Result<Self> {
        check_rate(q)?;
        edge_indices.sort_unstable();
        edge_indices.dedup();
        if let Some(&bad) = edge_indices.iter().find(|&&e| e >= graph.edge_count()) {
            return Err(Error::param(
                "edge_indices",
                alloc::format!("edge index {bad} out of range for {} edges", graph.edge_count()),
            ));
        }
        let retained = edge_indices.into_iter().map(|e| e as u32).collect();
        Ok(TriggeringSet { graph, retained, q })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn retained_count(&self) -> usize {
        self.retained.len()
    }

    pub fn retained_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.retained.iter().map(|&e| {
            let (a, b) = self.graph.edge(e as usize);
            (a as usize, b as usize)
        })
    }

    /// Degree of every node in `H`.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = alloc::vec![0; self.graph.node_count()];
        for (a, b) in self.retained_edges() {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }
}

fn percolate_into<R: Rng>(g: &Graph, q: f64, rng: &mut R, retained: &mut Vec<u32>) {
    retained.clear();
    for e in 0..g.edge_count() {
        if rng.random::<f64>() < q {
            retained.push(e as u32);
        }
    }
}

/// Retains each edge independently with probability `q`, drawing from `rng`.
pub fn percolate_with<'g, R: Rng>(g: &'g Graph, q: f64, rng: &mut R) -> Result<TriggeringSet<'g>> {
    check_rate(q)?;
    let mut retained = Vec::new();
    percolate_into(g, q, rng, &mut retained);
    Ok(TriggeringSet { graph: g, retained, q })
}

/// Retains each edge independently with probability `q`; one coin per
/// undirected edge, in edge order.
pub fn percolate(g: &Graph, q: f64, seed: u64) -> Result<TriggeringSet<'_>> {
    percolate_with(g, q, &mut rng_from_seed(seed))
}

/// Component ids and sizes of a triggering set.
///
/// Components are ranked by size, largest first; equal sizes are ordered by
/// their lowest node id. Label 0 is therefore `C^H_1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComponentLabeling {
    labels: Vec<u32>,
    sizes: Vec<usize>,
}

impl ComponentLabeling {
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v] as usize
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn largest(&self) -> usize {
        self.sizes.first().copied().unwrap_or(0)
    }

    pub fn second_largest(&self) -> usize {
        self.sizes.get(1).copied().unwrap_or(0)
    }

    pub fn in_largest(&self, v: usize) -> bool {
        self.labels[v] == 0
    }

    /// True when the largest component was picked by the tie rule.
    pub fn is_tied(&self) -> bool {
        self.sizes.len() > 1 && self.sizes[0] == self.sizes[1]
    }
}

#[derive(Clone, Debug, Default)]
struct Labeler {
    uf: UnionFind,
    slot: Vec<u32>,
    order: Vec<u32>,
}

impl Labeler {
    fn label_into(&mut self, g: &Graph, retained: &[u32], out: &mut ComponentLabeling) {
        let n = g.node_count();
        self.uf.reset(n);
        for &e in retained {
            let (a, b) = g.edge(e as usize);
            self.uf.union(a, b);
        }
        // Scanning nodes in ascending order discovers components by lowest id.
        self.slot.clear();
        self.slot.resize(n, u32::MAX);
        out.sizes.clear();
        out.labels.clear();
        for v in 0..n as u32 {
            let r = self.uf.find(v) as usize;
            if self.slot[r] == u32::MAX {
                self.slot[r] = out.sizes.len() as u32;
                out.sizes.push(self.uf.size_of_root(r as u32) as usize);
            }
            out.labels.push(self.slot[r]);
        }
        if out.sizes.windows(2).all(|w| w[0] >= w[1]) {
            return;
        }
        self.order.clear();
        self.order.extend(0..out.sizes.len() as u32);
        let sizes = &out.sizes;
        // Stable: equal sizes keep discovery (lowest id) order.
        self.order.sort_by(|&a, &b| sizes[b as usize].cmp(&sizes[a as usize]));
        // `slot` is free again; reuse it as discovery index -> rank.
        let rank = &mut self.slot[..self.order.len()];
        for (position, &c) in self.order.iter().enumerate() {
            rank[c as usize] = position as u32;
        }
        for l in out.labels.iter_mut() {
            *l = rank[*l as usize];
        }
        out.sizes.sort_unstable_by(|a, b| b.cmp(a));
    }
}

/// Exact connected components of the retained subgraph.
pub fn connected_components(h: &TriggeringSet<'_>) -> ComponentLabeling {
    let mut out = ComponentLabeling::default();
    Labeler::default().label_into(h.graph, &h.retained, &mut out);
    out
}

/// Result of one cascade on a fixed triggering set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CascadeOutcome {
    pub seeds: Vec<usize>,
    pub activated: Vec<bool>,
    pub count: usize,
    pub giant_active: bool,
}

impl CascadeOutcome {
    /// Cascades without seeds are allowed but never activate anything.
    pub fn is_seedless(&self) -> bool {
        self.seeds.is_empty()
    }
}

/// Activates every component of `labeling` that holds a seed.
pub fn cascade_on_labeling(labeling: &ComponentLabeling, seeds: &[usize]) -> Result<CascadeOutcome> {
    let n = labeling.labels.len();
    let mut hit = alloc::vec![false; labeling.component_count()];
    for &s in seeds {
        if s >= n {
            return Err(Error::NodeOutOfRange { node: s, node_count: n });
        }
        hit[labeling.label(s)] = true;
    }
    let count = hit
        .iter()
        .zip(&labeling.sizes)
        .filter(|(h, _)| **h)
        .map(|(_, s)| s)
        .sum();
    let activated = labeling.labels.iter().map(|&l| hit[l as usize]).collect();
    let mut seeds = seeds.to_vec();
    seeds.sort_unstable();
    seeds.dedup();
    Ok(CascadeOutcome {
        seeds,
        activated,
        count,
        giant_active: hit.first().copied().unwrap_or(false),
    })
}

/// Runs the cascade from `seeds` over the retained edges of `h`.
pub fn run_cascade(h: &TriggeringSet<'_>, seeds: &[usize]) -> Result<CascadeOutcome> {
    cascade_on_labeling(&connected_components(h), seeds)
}

/// Draws `s` distinct seeds from `g` under `policy`, sorted ascending.
pub fn sample_seeds_with<R: Rng>(g: &Graph, s: usize, policy: SeedPolicy, rng: &mut R) -> Result<Vec<usize>> {
    let n = g.node_count();
    check_seed_count(n, s)?;
    let mut out = match policy {
        SeedPolicy::Uniform => index::sample(rng, n, s).into_vec(),
        SeedPolicy::DegreeWeighted => {
            // Efraimidis–Spirakis keys ln(u) / w; larger is better.
            let mut keyed: Vec<(bool, f64, usize)> = (0..n)
                .map(|v| {
                    let u: f64 = rng.random::<f64>();
                    let w = g.degree(v) as f64;
                    if w > 0.0 {
                        (true, libm::log(1.0 - u) / w, v)
                    } else {
                        (false, u, v)
                    }
                })
                .collect();
            keyed.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.total_cmp(&a.1)));
            keyed.into_iter().take(s).map(|k| k.2).collect()
        }
    };
    out.sort_unstable();
    Ok(out)
}

/// Uniform sample of `s` distinct nodes out of `n`, sorted ascending.
pub fn sample_seeds(n: usize, s: usize, seed: u64) -> Result<Vec<usize>> {
    check_seed_count(n, s)?;
    let mut out = index::sample(&mut rng_from_seed(seed), n, s).into_vec();
    out.sort_unstable();
    Ok(out)
}

/// Reusable buffers for one worker's trials.
#[derive(Clone, Debug, Default)]
struct Scratch {
    labeler: Labeler,
    retained: Vec<u32>,
    labeling: ComponentLabeling,
    hit: Vec<bool>,
    seeds: Vec<usize>,
}

impl Scratch {
    fn percolate(&mut self, g: &Graph, q: f64, rng: &mut TrialRng) {
        percolate_into(g, q, rng, &mut self.retained);
        self.labeler.label_into(g, &self.retained, &mut self.labeling);
    }

    /// Percolates, draws seeds and returns `X`; `node_active` is valid after.
    fn cascade(&mut self, g: &Graph, params: &CascadeParams, rng: &mut TrialRng) -> usize {
        self.percolate(g, params.q, rng);
        self.seeds =
            sample_seeds_with(g, params.seed_count, params.seed_policy, rng).expect("seed count validated by caller");
        self.hit.clear();
        self.hit.resize(self.labeling.component_count(), false);
        let mut count = 0;
        for &s in &self.seeds {
            let c = self.labeling.label(s);
            if !self.hit[c] {
                self.hit[c] = true;
                count += self.labeling.sizes[c];
            }
        }
        count
    }

    fn giant_active(&self) -> bool {
        self.hit[0]
    }

    fn node_active(&self, v: usize) -> bool {
        self.hit[self.labeling.label(v)]
    }
}

/// Per-node frequency of membership in `C^H_1` over independent triggering sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipEstimate {
    trials: u64,
    counts: Vec<u64>,
    ties_broken: u64,
}

impl MembershipEstimate {
    pub fn from_counts(trials: u64, counts: Vec<u64>, ties_broken: u64) -> Result<Self> {
        check_trials(trials)?;
        if counts.iter().any(|&c| c > trials) || ties_broken > trials {
            return Err(Error::param("counts", "a count exceeds the number of trials"));
        }
        Ok(MembershipEstimate {
            trials,
            counts,
            ties_broken,
        })
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn node_count(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Trials in which `|C^H_1| = |C^H_2|` and the tie rule picked the giant.
    pub fn ties_broken(&self) -> u64 {
        self.ties_broken
    }

    pub fn frequency(&self, v: usize) -> f64 {
        self.counts[v] as f64 / self.trials as f64
    }

    pub fn frequencies(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.counts.iter().map(|&c| c as f64 / self.trials as f64)
    }

    pub fn max_frequency(&self) -> f64 {
        self.frequencies().fold(0.0, f64::max)
    }

    /// Number of nodes with frequency at or above `threshold`.
    pub fn count_at_least(&self, threshold: f64) -> usize {
        self.frequencies().filter(|&f| f >= threshold).count()
    }
}

pub fn estimate_giant_membership(g: &Graph, q: f64, trials: u64, seed: u64) -> Result<MembershipEstimate> {
    check_rate(q)?;
    check_trials(trials)?;
    let n = g.node_count();
    let (counts, ties, _) = fold_trials(
        trials,
        seed,
        || (alloc::vec![0u64; n], 0u64, Scratch::default()),
        |(counts, ties, scratch), _, rng| {
            scratch.percolate(g, q, rng);
            for (c, &l) in counts.iter_mut().zip(&scratch.labeling.labels) {
                *c += (l == 0) as u64;
            }
            *ties += scratch.labeling.is_tied() as u64;
        },
        |(mut a, ta, s), (b, tb, _)| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            (a, ta + tb, s)
        },
    );
    Ok(MembershipEstimate {
        trials,
        counts,
        ties_broken: ties,
    })
}

/// Integer sums of `|C^H_1|` and `|C^H_2|` over percolation trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ComponentStats {
    pub trials: u64,
    pub sum_largest: u64,
    pub sum_sq_largest: u64,
    pub sum_second: u64,
    pub sum_sq_second: u64,
}

impl ComponentStats {
    fn add(self, o: Self) -> Self {
        ComponentStats {
            trials: self.trials + o.trials,
            sum_largest: self.sum_largest + o.sum_largest,
            sum_sq_largest: self.sum_sq_largest + o.sum_sq_largest,
            sum_second: self.sum_second + o.sum_second,
            sum_sq_second: self.sum_sq_second + o.sum_sq_second,
        }
    }

    pub fn mean_largest(&self) -> f64 {
        self.sum_largest as f64 / self.trials as f64
    }

    pub fn mean_second(&self) -> f64 {
        self.sum_second as f64 / self.trials as f64
    }

    pub fn sd_largest(&self) -> f64 {
        sample_sd(self.trials, self.sum_largest, self.sum_sq_largest)
    }

    pub fn sd_second(&self) -> f64 {
        sample_sd(self.trials, self.sum_second, self.sum_sq_second)
    }
}

fn sample_sd(n: u64, sum: u64, sum_sq: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let n = n as f64;
    let mean = sum as f64 / n;
    let var = (sum_sq as f64 - n * mean * mean) / (n - 1.0);
    libm::sqrt(var.max(0.0))
}

pub fn component_size_stats(g: &Graph, q: f64, trials: u64, seed: u64) -> Result<ComponentStats> {
    check_rate(q)?;
    check_trials(trials)?;
    let (stats, _) = fold_trials(
        trials,
        seed,
        || (ComponentStats::default(), Scratch::default()),
        |(stats, scratch), _, rng| {
            scratch.percolate(g, q, rng);
            let (a, b) = (
                scratch.labeling.largest() as u64,
                scratch.labeling.second_largest() as u64,
            );
            *stats = stats.add(ComponentStats {
                trials: 1,
                sum_largest: a,
                sum_sq_largest: a * a,
                sum_second: b,
                sum_sq_second: b * b,
            });
        },
        |(a, s), (b, _)| (a.add(b), s),
    );
    Ok(stats)
}

/// How often nodes of a given degree in `H` fall outside `C^H_1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DegreeTally {
    pub degree: usize,
    pub samples: u64,
    pub outside_largest: u64,
}

impl DegreeTally {
    pub fn exclusion_rate(&self) -> Option<f64> {
        (self.samples > 0).then(|| self.outside_largest as f64 / self.samples as f64)
    }
}

/// Pools every (node, trial) pair by the node's degree in `H`, for degrees
/// `0..=max_degree`.
pub fn exclusion_by_h_degree(g: &Graph, q: f64, trials: u64, seed: u64, max_degree: usize) -> Result<Vec<DegreeTally>> {
    check_rate(q)?;
    check_trials(trials)?;
    let n = g.node_count();
    let k = max_degree + 1;
    let (samples, outside, _, _) = fold_trials(
        trials,
        seed,
        || {
            (
                alloc::vec![0u64; k],
                alloc::vec![0u64; k],
                alloc::vec![0u32; n],
                Scratch::default(),
            )
        },
        |(samples, outside, deg, scratch), _, rng| {
            scratch.percolate(g, q, rng);
            deg.iter_mut().for_each(|d| *d = 0);
            for &e in &scratch.retained {
                let (a, b) = g.edge(e as usize);
                deg[a as usize] += 1;
                deg[b as usize] += 1;
            }
            for (v, &d) in deg.iter().enumerate() {
                let d = d as usize;
                if d < k {
                    samples[d] += 1;
                    outside[d] += !scratch.labeling.in_largest(v) as u64;
                }
            }
        },
        |(mut s1, mut o1, d, sc), (s2, o2, _, _)| {
            s1.iter_mut().zip(s2).for_each(|(a, b)| *a += b);
            o1.iter_mut().zip(o2).for_each(|(a, b)| *a += b);
            (s1, o1, d, sc)
        },
    );
    Ok((0..k)
        .map(|d| DegreeTally {
            degree: d,
            samples: samples[d],
            outside_largest: outside[d],
        })
        .collect())
}

/// `μ^v_0` and `μ^v_1`: the count `X` conditioned on a node's own state.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeConditional {
    pub node: usize,
    pub given_inactive: EmpiricalDistribution,
    pub given_active: EmpiricalDistribution,
    pub inactive_samples: u64,
    pub active_samples: u64,
}

/// Conditional count distributions for several nodes from one shared run of
/// `trials` (triggering set, seed set) draws. Each node's entry is its own
/// result so a degenerate node does not sink the rest.
pub fn conditional_count_distributions_many(
    g: &Graph,
    params: &CascadeParams,
    nodes: &[usize],
    trials: u64,
    seed: u64,
) -> Result<Vec<Result<NodeConditional>>> {
    params.validate(g)?;
    check_trials(trials)?;
    let n = g.node_count();
    if let Some(&v) = nodes.iter().find(|&&v| v >= n) {
        return Err(Error::NodeOutOfRange { node: v, node_count: n });
    }
    let records = map_trials(trials, seed, |_, rng| {
        let mut scratch = Scratch::default();
        let x = scratch.cascade(g, params, rng) as u32;
        let bits: Vec<bool> = nodes.iter().map(|&v| scratch.node_active(v)).collect();
        (x, bits)
    });
    Ok(nodes
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut inactive = alloc::vec![0u64; n + 1];
            let mut active = alloc::vec![0u64; n + 1];
            for (x, bits) in &records {
                if bits[i] {
                    active[*x as usize] += 1;
                } else {
                    inactive[*x as usize] += 1;
                }
            }
            let (given_inactive, inactive_samples) = branch(inactive, Branch::NodeInactive, trials)?;
            let (given_active, active_samples) = branch(active, Branch::NodeActive, trials)?;
            Ok(NodeConditional {
                node: v,
                given_inactive,
                given_active,
                inactive_samples,
                active_samples,
            })
        })
        .collect())
}

pub fn conditional_count_distributions(
    g: &Graph,
    params: &CascadeParams,
    node: usize,
    trials: u64,
    seed: u64,
) -> Result<NodeConditional> {
    conditional_count_distributions_many(g, params, &[node], trials, seed)?.remove(0)
}

fn branch(hist: Vec<u64>, which: Branch, trials: u64) -> Result<(EmpiricalDistribution, u64)> {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return Err(Error::DegenerateConditioning { branch: which, trials });
    }
    let dist = EmpiricalDistribution::from_counts(hist.into_iter().enumerate().map(|(x, c)| (x as i64, c)))?;
    Ok((dist, total))
}

/// `X_0` and `X_1`: the count conditioned on whether a seed reached `C^H_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GiantSplit {
    pub inactive: EmpiricalDistribution,
    pub active: EmpiricalDistribution,
    pub inactive_samples: u64,
    pub active_samples: u64,
}

impl GiantSplit {
    /// `θ_0`: largest observed count with the giant inactive.
    pub fn theta_inactive(&self) -> i64 {
        self.inactive.max_value()
    }

    /// `θ_1`: smallest observed count with the giant active.
    pub fn theta_active(&self) -> i64 {
        self.active.min_value()
    }

    /// `θ_m = (θ_0 + θ_1) / 2`.
    pub fn midpoint(&self) -> f64 {
        (self.theta_inactive() + self.theta_active()) as f64 / 2.0
    }

    /// `θ_1 − θ_0`. Empirical extremes can only shrink the true gap.
    pub fn gap(&self) -> i64 {
        self.theta_active() - self.theta_inactive()
    }
}

pub fn conditional_giant_distributions(
    g: &Graph,
    params: &CascadeParams,
    trials: u64,
    seed: u64,
) -> Result<GiantSplit> {
    params.validate(g)?;
    check_trials(trials)?;
    let n = g.node_count();
    let records = map_trials(trials, seed, |_, rng| {
        let mut scratch = Scratch::default();
        let x = scratch.cascade(g, params, rng);
        (x, scratch.giant_active())
    });
    let mut inactive = alloc::vec![0u64; n + 1];
    let mut active = alloc::vec![0u64; n + 1];
    for (x, on) in records {
        if on {
            active[x] += 1;
        } else {
            inactive[x] += 1;
        }
    }
    let (inactive, inactive_samples) = branch(inactive, Branch::GiantInactive, trials)?;
    let (active, active_samples) = branch(active, Branch::GiantActive, trials)?;
    Ok(GiantSplit {
        inactive,
        active,
        inactive_samples,
        active_samples,
    })
}

/// One simulated world, as seen by an attacker evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialWorld {
    pub count: usize,
    pub giant_active: bool,
    pub largest: usize,
    pub second_largest: usize,
    pub activated: Vec<bool>,
}

/// Draws a triggering set and seed set and returns the resulting world.
pub fn simulate_world(g: &Graph, params: &CascadeParams, rng: &mut TrialRng) -> Result<TrialWorld> {
    params.validate(g)?;
    let mut scratch = Scratch::default();
    let count = scratch.cascade(g, params, rng);
    Ok(TrialWorld {
        count,
        giant_active: scratch.giant_active(),
        largest: scratch.labeling.largest(),
        second_largest: scratch.labeling.second_largest(),
        activated: (0..g.node_count()).map(|v| scratch.node_active(v)).collect(),
    })
}
