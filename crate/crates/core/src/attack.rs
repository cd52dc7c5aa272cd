//! The inference attack: read the giant component's state off a released
//! count, then label nodes by how often they sit in the giant.

use alloc::vec::Vec;

use crate::bounds::{cl_giant_condition, er_membership_bound, solve_giant_fraction, ChungLuBound, ChungLuBoundParams};
use crate::error::{check_probability, Error};
use crate::graph::{Graph, NodeWeights};
use crate::percolation::{
    conditional_giant_distributions, estimate_giant_membership, simulate_world, CascadeParams, MembershipEstimate,
};
use crate::privacy::MechanismSpec;
use crate::trials::{child_seed, fold_trials};
use crate::Result;

/// Default tail probability for turning unbounded noise into a max error.
pub const DEFAULT_ERROR_DELTA: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GiantStatus {
    Active,
    Inactive,
}

/// Active iff the report exceeds the threshold.
pub fn classify_giant_status(reported: f64, threshold: f64) -> GiantStatus {
    if reported > threshold {
        GiantStatus::Active
    } else {
        GiantStatus::Inactive
    }
}

/// `(1 − δ)`-quantile of `|Lap(scale)|`.
pub fn laplace_max_error(scale: f64, delta: f64) -> f64 {
    scale * libm::log(1.0 / delta)
}

/// Error of the debiased randomized-response count that is exceeded with
/// probability at most `δ` (Hoeffding on the reported sum).
pub fn randomized_response_max_error(n: u64, flip_prob: f64, delta: f64) -> f64 {
    libm::sqrt(n as f64 * libm::log(2.0 / delta) / 2.0) / (1.0 - flip_prob)
}

/// Max error `e_M` that a mechanism stays within with probability `1 − δ`.
pub fn mechanism_max_error(spec: &MechanismSpec, n: u64, delta: f64) -> f64 {
    match *spec {
        MechanismSpec::RandomizedResponse { flip_prob } => randomized_response_max_error(n, flip_prob, delta),
        _ => laplace_max_error(spec.noise_scale().unwrap_or(0.0), delta),
    }
}

/// What the adversary knows going in.
#[derive(Clone, Debug, PartialEq)]
pub struct AttackConfig {
    /// `e_M`
    pub max_error: f64,
    /// `θ_m`
    pub threshold: f64,
    /// `ϵ`, the tolerated failure probability per certified node.
    pub slack: f64,
    pub membership: MembershipEstimate,
}

impl AttackConfig {
    pub fn new(max_error: f64, threshold: f64, slack: f64, membership: MembershipEstimate) -> Result<Self> {
        if max_error.is_nan() || max_error < 0.0 {
            return Err(Error::param("max_error", "must be non-negative"));
        }
        if threshold.is_nan() || threshold <= 0.0 {
            return Err(Error::param("threshold", "must be positive"));
        }
        if !(0.0..1.0).contains(&slack) {
            return Err(Error::param("slack", "must lie in [0, 1)"));
        }
        Ok(AttackConfig {
            max_error,
            threshold,
            slack,
            membership,
        })
    }

    /// Nodes whose estimated membership reaches `1 − ϵ`.
    pub fn certified_nodes(&self) -> Vec<usize> {
        let floor = 1.0 - self.slack;
        (0..self.membership.node_count())
            .filter(|&v| self.membership.frequency(v) >= floor)
            .collect()
    }

    pub fn classify(&self, reported: f64) -> GiantStatus {
        classify_giant_status(reported, self.threshold)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodePrediction {
    pub node: usize,
    /// Predicted `x_v`.
    pub label: bool,
    /// The node's membership frequency, a lower bound on the posterior.
    pub confidence: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttackVerdict {
    pub status: GiantStatus,
    pub predictions: Vec<NodePrediction>,
    pub abstained: Vec<usize>,
}

/// Predicts the giant's state for every node whose membership frequency
/// reaches `floor`; the rest abstain.
pub fn infer_nodes(status: GiantStatus, membership: &MembershipEstimate, floor: f64) -> Result<AttackVerdict> {
    check_probability("floor", floor)?;
    let label = status == GiantStatus::Active;
    let mut predictions = Vec::new();
    let mut abstained = Vec::new();
    for (node, confidence) in membership.frequencies().enumerate() {
        if confidence >= floor {
            predictions.push(NodePrediction {
                node,
                label,
                confidence,
            });
        } else {
            abstained.push(node);
        }
    }
    Ok(AttackVerdict {
        status,
        predictions,
        abstained,
    })
}

/// Everything `evaluate_attack` needs besides the graph and master seed.
#[derive(Clone, Debug, PartialEq)]
pub struct AttackSetup {
    pub params: CascadeParams,
    pub mechanism: MechanismSpec,
    pub floors: Vec<f64>,
    /// Worlds the attack is scored on.
    pub trials: u64,
    /// Triggering sets used to estimate membership frequencies.
    pub membership_trials: u64,
    /// Worlds used to place `θ_m` between the measured `θ_0` and `θ_1`.
    pub calibration_trials: u64,
    /// Fixed `θ_m`; calibrated when `None`.
    pub threshold: Option<f64>,
    pub error_delta: f64,
}

impl AttackSetup {
    pub fn new(params: CascadeParams, mechanism: MechanismSpec, floors: Vec<f64>, trials: u64) -> Self {
        AttackSetup {
            params,
            mechanism,
            floors,
            trials,
            membership_trials: trials,
            calibration_trials: trials,
            threshold: None,
            error_delta: DEFAULT_ERROR_DELTA,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloorReport {
    pub floor: f64,
    pub predicted_nodes: usize,
    /// Node-trial predictions made (`predicted_nodes × trials`).
    pub predictions: u64,
    pub correct: u64,
}

impl FloorReport {
    /// Fraction of correct predictions; `None` when every node abstained.
    pub fn precision(&self) -> Option<f64> {
        (self.predictions > 0).then(|| self.correct as f64 / self.predictions as f64)
    }

    pub fn coverage(&self, n: usize) -> f64 {
        self.predicted_nodes as f64 / n as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttackReport {
    pub config: AttackConfig,
    pub trials: u64,
    pub giant_active_trials: u64,
    pub status_correct: u64,
    /// Per node: trials in which the giant-driven label matched `x_v`.
    pub node_correct: Vec<u64>,
    pub floors: Vec<FloorReport>,
}

impl AttackReport {
    pub fn status_accuracy(&self) -> f64 {
        self.status_correct as f64 / self.trials as f64
    }

    /// Accuracy of always guessing the more frequent giant state.
    pub fn status_baseline(&self) -> f64 {
        let p = self.giant_active_trials as f64 / self.trials as f64;
        p.max(1.0 - p)
    }

    /// Accuracy of a node's label over all scored trials. A node predicted at
    /// any floor gets the same label in every trial, so this is its accuracy
    /// whenever it is predicted.
    pub fn node_accuracy(&self, v: usize) -> f64 {
        self.node_correct[v] as f64 / self.trials as f64
    }
}

/// Scores the attack end to end: estimate membership, calibrate `θ_m`, then
/// for each fresh world release `X` through the mechanism, classify, and
/// compare every prediction with the simulated `x_v`.
pub fn evaluate_attack(g: &Graph, setup: &AttackSetup, seed: u64) -> Result<AttackReport> {
    setup.mechanism.validate()?;
    for &f in &setup.floors {
        check_probability("floor", f)?;
    }
    let n = g.node_count();
    let membership = estimate_giant_membership(g, setup.params.q, setup.membership_trials, child_seed(seed, 0))?;
    let threshold = match setup.threshold {
        Some(t) => t,
        None => {
            conditional_giant_distributions(g, &setup.params, setup.calibration_trials, child_seed(seed, 1))?.midpoint()
        }
    };
    let max_error = mechanism_max_error(&setup.mechanism, n as u64, setup.error_delta);
    let config = AttackConfig::new(max_error, threshold, setup.error_delta, membership)?;
    // Surface parameter errors before spawning trials.
    simulate_world(g, &setup.params, &mut crate::trials::rng_from_seed(0))?;
    if setup.trials == 0 {
        return Err(Error::param("trials", "need at least one trial"));
    }

    let (node_correct, status_correct, giant_active_trials) = fold_trials(
        setup.trials,
        child_seed(seed, 2),
        || (alloc::vec![0u64; n], 0u64, 0u64),
        |(correct, status_ok, active), _, rng| {
            let world = simulate_world(g, &setup.params, rng).expect("validated");
            let reported = setup
                .mechanism
                .release(&world.activated, world.count as u64, rng)
                .expect("validated");
            let status = config.classify(reported);
            let label = status == GiantStatus::Active;
            *status_ok += (label == world.giant_active) as u64;
            *active += world.giant_active as u64;
            for (c, &x) in correct.iter_mut().zip(&world.activated) {
                *c += (x == label) as u64;
            }
        },
        |(mut a, sa, ga), (b, sb, gb)| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            (a, sa + sb, ga + gb)
        },
    );

    let floors = setup
        .floors
        .iter()
        .map(|&floor| {
            let nodes: Vec<usize> = (0..n).filter(|&v| config.membership.frequency(v) >= floor).collect();
            FloorReport {
                floor,
                predicted_nodes: nodes.len(),
                predictions: nodes.len() as u64 * setup.trials,
                correct: nodes.iter().map(|&v| node_correct[v]).sum(),
            }
        })
        .collect();
    Ok(AttackReport {
        config,
        trials: setup.trials,
        giant_active_trials,
        status_correct,
        node_correct,
        floors,
    })
}

/// Nodes of `G(n, p)` certified by the degree bound: those with
/// `min(1, exp(-dq/8) + exp(-dqy/2)) <= slack`.
pub fn vulnerable_set_er(g: &Graph, p: f64, q: f64, slack: f64) -> Result<Vec<usize>> {
    check_probability("p", p)?;
    check_probability("q", q)?;
    check_probability("slack", slack)?;
    let c = g.node_count() as f64 * p * q;
    if c <= 1.0 {
        return Err(Error::Subcritical(c));
    }
    let y = solve_giant_fraction(c)?.fraction;
    let mut out = Vec::new();
    for v in 0..g.node_count() {
        if er_membership_bound(g.degree(v) as u64, q, y)? <= slack {
            out.push(v);
        }
    }
    Ok(out)
}

/// Chung–Lu nodes (0-based, rank `v + 1`) whose membership bound is at most
/// `slack`. Always a prefix of the ranks.
pub fn vulnerable_set_cl(weights: &NodeWeights, q: f64, slack: f64, alpha: f64) -> Result<Vec<usize>> {
    check_probability("slack", slack)?;
    let (b, d) = (weights.scale(), weights.min_degree());
    if !cl_giant_condition(b, d, q)? {
        return Err(Error::ChungLuSubcritical { b, dq: d * q });
    }
    let bound = ChungLuBound::new(ChungLuBoundParams {
        n: weights.len() as u64,
        min_degree: d,
        q,
        scale: b,
        alpha,
    })?;
    let mut out = Vec::new();
    for v in 0..weights.len() {
        if bound.at_rank(v as u64 + 1)? <= slack {
            out.push(v);
        } else {
            break;
        }
    }
    Ok(out)
}
