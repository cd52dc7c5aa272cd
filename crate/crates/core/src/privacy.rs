//! Output perturbation and the distributional tools used to judge it: total
//! variation, the ∞-Wasserstein distance on the line, and the scale of the
//! Wasserstein mechanism for node-state secrets.

use alloc::vec::Vec;
use rand::Rng;

pub use crate::distribution::EmpiricalDistribution;
use crate::error::{check_positive, check_probability, Branch, Error};
use crate::graph::Graph;
use crate::percolation::{conditional_count_distributions_many, CascadeParams};
use crate::trials::rng_from_seed;
use crate::Result;

/// Laplace noise is convolved out to this many scales; the clipped tails
/// (`e^{-12}` of the mass) go to the last cell on their side of each atom.
pub const TAIL_SCALES: f64 = 12.0;

/// Comonotone coupling segments shorter than this are rounding residue.
const SEGMENT_EPS: f64 = 1e-12;

/// `½ Σ |μ(x) − ν(x)|` over the union of supports.
pub fn tvd(mu: &EmpiricalDistribution, nu: &EmpiricalDistribution) -> f64 {
    let (a, b) = (mu.atoms(), nu.atoms());
    let (mut i, mut j) = (0, 0);
    let mut sum = 0.0;
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 <= b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 <= a[i].0);
        let pa = if take_a { a[i].1 } else { 0.0 };
        let pb = if take_b { b[j].1 } else { 0.0 };
        sum += (pa - pb).abs();
        i += take_a as usize;
        j += take_b as usize;
    }
    (0.5 * sum).min(1.0)
}

/// `W_∞(μ, ν)` via the quantile (comonotone) coupling, which is optimal on
/// the line: the largest `|F⁻¹(u) − G⁻¹(u)|` over levels `u` of positive
/// measure.
pub fn wasserstein_infinity(mu: &EmpiricalDistribution, nu: &EmpiricalDistribution) -> f64 {
    let (a, b) = (mu.atoms(), nu.atoms());
    let (mut i, mut j) = (0, 0);
    let (mut ca, mut cb) = (a[0].1, b[0].1);
    let mut level = 0.0f64;
    let mut worst = 0i64;
    loop {
        let top = ca.min(cb);
        if top - level > SEGMENT_EPS {
            worst = worst.max((a[i].0 - b[j].0).abs());
        }
        level = level.max(top);
        let step_a = ca <= cb + SEGMENT_EPS;
        let step_b = cb <= ca + SEGMENT_EPS;
        if step_a {
            i += 1;
            if i == a.len() {
                break;
            }
            ca += a[i].1;
        }
        if step_b {
            j += 1;
            if j == b.len() {
                break;
            }
            cb += b[j].1;
        }
    }
    worst as f64
}

/// Draws one `Lap(0, scale)` variate: a random sign times an exponential.
pub fn sample_laplace<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    let u: f64 = rng.random();
    let magnitude = -scale * libm::log(1.0 - u);
    if rng.random::<bool>() {
        magnitude
    } else {
        -magnitude
    }
}

/// `x + Lap(scale)`, optionally clipped to `[0, n]`.
pub fn laplace_perturb(x: u64, n: u64, scale: f64, clamp: bool, seed: u64) -> Result<f64> {
    check_positive("scale", scale)?;
    let z = x as f64 + sample_laplace(&mut rng_from_seed(seed), scale);
    Ok(if clamp { z.clamp(0.0, n as f64) } else { z })
}

/// Clips to `[0, n]` and rounds to the nearest count.
pub fn clamp_round(value: f64, n: u64) -> u64 {
    libm::round(value.clamp(0.0, n as f64)) as u64
}

/// Each respondent answers truthfully with probability `1 − flip_prob` and
/// otherwise reports a fair coin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomizedResponse {
    pub reported: u64,
    /// `(reported − n·flip/2) / (1 − flip)`, unbiased for the true count.
    pub estimate: f64,
}

pub fn randomized_response_with<R: Rng + ?Sized>(
    bits: &[bool],
    flip_prob: f64,
    rng: &mut R,
) -> Result<RandomizedResponse> {
    check_probability("flip_prob", flip_prob)?;
    if flip_prob >= 1.0 {
        return Err(Error::param(
            "flip_prob",
            "estimator is undefined when every answer is random",
        ));
    }
    let reported = bits
        .iter()
        .filter(|&&b| {
            if rng.random::<f64>() < flip_prob {
                rng.random::<bool>()
            } else {
                b
            }
        })
        .count() as u64;
    let n = bits.len() as f64;
    let estimate = (reported as f64 - n * flip_prob / 2.0) / (1.0 - flip_prob);
    Ok(RandomizedResponse { reported, estimate })
}

pub fn randomized_response_estimate(bits: &[bool], flip_prob: f64, seed: u64) -> Result<RandomizedResponse> {
    randomized_response_with(bits, flip_prob, &mut rng_from_seed(seed))
}

/// A count-release mechanism.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MechanismSpec {
    Laplace {
        scale: f64,
        clamp: bool,
    },
    RandomizedResponse {
        flip_prob: f64,
    },
    /// Laplace with scale `W / ε`. `W = 0` releases the count unchanged.
    Wasserstein {
        sensitivity: f64,
        epsilon: f64,
        clamp: bool,
    },
}

impl MechanismSpec {
    pub fn laplace(scale: f64) -> Self {
        MechanismSpec::Laplace { scale, clamp: false }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MechanismSpec::Laplace { .. } => "laplace",
            MechanismSpec::RandomizedResponse { .. } => "randomized_response",
            MechanismSpec::Wasserstein { .. } => "wasserstein",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            MechanismSpec::Laplace { scale, .. } => check_positive("scale", scale),
            MechanismSpec::RandomizedResponse { flip_prob } => {
                check_probability("flip_prob", flip_prob)?;
                if flip_prob >= 1.0 {
                    return Err(Error::param("flip_prob", "must be below 1"));
                }
                Ok(())
            }
            MechanismSpec::Wasserstein {
                sensitivity, epsilon, ..
            } => {
                check_positive("epsilon", epsilon)?;
                if !(sensitivity >= 0.0 && sensitivity.is_finite()) {
                    return Err(Error::param("sensitivity", "must be finite and non-negative"));
                }
                Ok(())
            }
        }
    }

    /// Laplace scale of the additive-noise kinds.
    pub fn noise_scale(&self) -> Option<f64> {
        match *self {
            MechanismSpec::Laplace { scale, .. } => Some(scale),
            MechanismSpec::Wasserstein {
                sensitivity, epsilon, ..
            } => Some(sensitivity / epsilon),
            MechanismSpec::RandomizedResponse { .. } => None,
        }
    }

    fn clamps(&self) -> bool {
        match *self {
            MechanismSpec::Laplace { clamp, .. } | MechanismSpec::Wasserstein { clamp, .. } => clamp,
            MechanismSpec::RandomizedResponse { .. } => false,
        }
    }

    /// Releases a perturbed count given the individual states.
    pub fn release<R: Rng + ?Sized>(&self, activated: &[bool], count: u64, rng: &mut R) -> Result<f64> {
        let n = activated.len() as u64;
        match *self {
            MechanismSpec::RandomizedResponse { flip_prob } => {
                Ok(randomized_response_with(activated, flip_prob, rng)?.estimate)
            }
            _ => {
                let scale = self.noise_scale().unwrap_or(0.0);
                let z = if scale > 0.0 {
                    count as f64 + sample_laplace(rng, scale)
                } else {
                    count as f64
                };
                Ok(if self.clamps() { z.clamp(0.0, n as f64) } else { z })
            }
        }
    }
}

/// `P(Lap(scale) ∈ (d − ½, d + ½])`, computed without cancellation.
fn laplace_cell(d: i64, scale: f64) -> f64 {
    let e = |t: f64| libm::exp(t / scale);
    let m = d.unsigned_abs() as f64;
    if d == 0 {
        -libm::expm1(-0.5 / scale)
    } else {
        0.5 * (e(-(m - 0.5)) - e(-(m + 0.5)))
    }
}

/// Exact distribution of the mechanism's output rounded to the nearest
/// integer: atom `k` holds `P(k − ½ < X + noise ≤ k + ½)`. With clamping, mass
/// outside `[0, n]` is moved to the nearest end.
pub fn push_through_mechanism(
    dist: &EmpiricalDistribution,
    spec: &MechanismSpec,
    n: u64,
) -> Result<EmpiricalDistribution> {
    spec.validate()?;
    let scale = spec.noise_scale().ok_or(Error::UnsupportedMechanism(spec.kind()))?;
    let clamp = spec.clamps();
    if scale == 0.0 {
        return clamp_atoms(dist.atoms().to_vec(), clamp, n);
    }
    let reach = libm::ceil(TAIL_SCALES * scale) as i64;
    let kernel: Vec<f64> = (-reach..=reach).map(|d| laplace_cell(d, scale)).collect();
    // Mass beyond the kernel on either side, folded into the kernel's ends.
    let tail = 0.5 * libm::exp(-(reach as f64 + 0.5) / scale);
    let lo = dist.min_value() - reach;
    let hi = dist.max_value() + reach;
    let mut out = alloc::vec![0.0f64; (hi - lo + 1) as usize];
    for &(x, p) in dist.atoms() {
        let base = (x - reach - lo) as usize;
        let cells = &mut out[base..base + kernel.len()];
        for (slot, k) in cells.iter_mut().zip(&kernel) {
            *slot += p * k;
        }
        cells[0] += p * tail;
        cells[kernel.len() - 1] += p * tail;
    }
    let atoms = out.into_iter().enumerate().map(|(i, p)| (lo + i as i64, p)).collect();
    clamp_atoms(atoms, clamp, n)
}

fn clamp_atoms(atoms: Vec<(i64, f64)>, clamp: bool, n: u64) -> Result<EmpiricalDistribution> {
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    let mut merged: Vec<(i64, f64)> = Vec::with_capacity(atoms.len());
    for (v, p) in atoms {
        let v = if clamp { v.clamp(0, n as i64) } else { v };
        match merged.last_mut() {
            Some(last) if last.0 == v => last.1 += p,
            _ => merged.push((v, p)),
        }
    }
    for a in merged.iter_mut() {
        a.1 /= total;
    }
    EmpiricalDistribution::from_atoms(merged)
}

/// Hypothesis-testing error between two output distributions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HypothesisTestReport {
    pub tvd: f64,
    /// Always `1 − tvd`.
    pub test_error: f64,
    /// Decision threshold the outputs were built around, if any.
    pub threshold: Option<f64>,
}

pub fn hypothesis_test_error(z0: &EmpiricalDistribution, z1: &EmpiricalDistribution) -> HypothesisTestReport {
    let t = tvd(z0, z1);
    HypothesisTestReport {
        tvd: t,
        test_error: 1.0 - t,
        threshold: None,
    }
}

/// `W_∞(μ^v_0, μ^v_1)` for one protected node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeDistance {
    pub node: usize,
    pub distance: f64,
    pub inactive_samples: u64,
    pub active_samples: u64,
}

/// Scale `W` of the Wasserstein mechanism protecting `x_v = 0` vs `x_v = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct WassersteinScale {
    /// Supremum of the per-node distances.
    pub sensitivity: f64,
    pub per_node: Vec<NodeDistance>,
    /// Nodes left out because one of their branches was never observed.
    pub degenerate: Vec<(usize, Branch)>,
}

impl WassersteinScale {
    /// Mean absolute noise of `Lap(W / ε)`, which is `W / ε`.
    pub fn mean_abs_noise(&self, epsilon: f64) -> f64 {
        self.sensitivity / epsilon
    }
}

pub fn wasserstein_mechanism_scale(
    g: &Graph,
    params: &CascadeParams,
    protected: &[usize],
    trials: u64,
    seed: u64,
) -> Result<WassersteinScale> {
    if protected.is_empty() {
        return Err(Error::param("protected", "need at least one protected node"));
    }
    let mut per_node = Vec::new();
    let mut degenerate = Vec::new();
    let mut first_error = None;
    for (node, result) in protected.iter().zip(conditional_count_distributions_many(
        g, params, protected, trials, seed,
    )?) {
        match result {
            Ok(c) => per_node.push(NodeDistance {
                node: *node,
                distance: wasserstein_infinity(&c.given_inactive, &c.given_active),
                inactive_samples: c.inactive_samples,
                active_samples: c.active_samples,
            }),
            Err(Error::DegenerateConditioning { branch, trials }) => {
                degenerate.push((*node, branch));
                first_error.get_or_insert(Error::DegenerateConditioning { branch, trials });
            }
            Err(e) => return Err(e),
        }
    }
    if per_node.is_empty() {
        return Err(first_error.expect("every protected node failed"));
    }
    let sensitivity = per_node.iter().map(|d| d.distance).fold(0.0, f64::max);
    Ok(WassersteinScale {
        sensitivity,
        per_node,
        degenerate,
    })
}
