//! Closed-form predictions for giant components and membership probabilities.
//!
//! All logarithms are natural.

use crate::error::{check_positive, check_probability, Error};
use crate::graph::Graph;
use crate::Result;

const BISECTION_TOLERANCE: f64 = 1e-10;
const BISECTION_MAX_ITERATIONS: usize = 200;

/// Giant-component fraction `y` of `G(n, c/n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GiantFractionSolution {
    pub mean_degree: f64,
    pub fraction: f64,
}

/// Solves `e^{-c y} = 1 - y` for the positive root; `y = 0` when `c <= 1`.
///
/// Bisects `(e^{-c y} - 1) / y + 1`, which is `1 - c < 0` near zero and
/// `e^{-c} > 0` at one, so the trivial root at `y = 0` never enters the bracket.
pub fn solve_giant_fraction(c: f64) -> Result<GiantFractionSolution> {
    check_positive("c", c)?;
    if c <= 1.0 {
        return Ok(GiantFractionSolution {
            mean_degree: c,
            fraction: 0.0,
        });
    }
    let g = |y: f64| libm::expm1(-c * y) / y + 1.0;
    let (mut lo, mut hi) = (f64::MIN_POSITIVE, 1.0);
    for _ in 0..BISECTION_MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < BISECTION_TOLERANCE * 1e-4 {
            break;
        }
    }
    Ok(GiantFractionSolution {
        mean_degree: c,
        fraction: 0.5 * (lo + hi),
    })
}

/// `ln n / ln ln n`, the high-probability maximum degree of sparse `G(n, p)`.
pub fn er_max_degree_estimate(n: u64) -> Result<f64> {
    if n < 16 {
        return Err(Error::param("n", "need n >= 16 so that ln ln n > 0 comfortably"));
    }
    let ln = libm::log(n as f64);
    Ok(ln / libm::log(ln))
}

/// Approximate probability that a node of degree `k` in `H` misses `C^H_1`:
/// `exp(-k y)`.
pub fn lemma2_membership_approx(k: u64, y: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&y) {
        return Err(Error::param("y", "giant fraction must lie in [0, 1)"));
    }
    Ok(libm::exp(-(k as f64) * y))
}

/// Upper bound on `Pr[i ∉ C^H_1]` for a node of degree `d` in `G(n, p)`:
/// `min(1, exp(-dq/8) + exp(-dqy/2))`.
pub fn er_membership_bound(d: u64, q: f64, y: f64) -> Result<f64> {
    check_probability("q", q)?;
    let dq = d as f64 * q;
    Ok((libm::exp(-dq / 8.0) + libm::exp(-dq * y / 2.0)).min(1.0))
}

/// `Σ_{j=1}^{n} j^{-β}`, summed smallest terms first.
pub fn partial_zeta(n: u64, beta: f64) -> f64 {
    (1..=n).rev().map(|j| libm::pow(j as f64, -beta)).sum()
}

/// Parameters of a percolated Chung–Lu graph for membership bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChungLuBoundParams {
    pub n: u64,
    pub min_degree: f64,
    pub q: f64,
    pub scale: f64,
    /// Measured giant fraction `α` of the triggering set.
    pub alpha: f64,
}

impl ChungLuBoundParams {
    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("n", "must be positive"));
        }
        check_positive("d", self.min_degree)?;
        check_probability("q", self.q)?;
        check_positive("b", self.scale)?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::param("alpha", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Precomputes the partial sum so bounds for many ranks are cheap.
#[derive(Clone, Copy, Debug)]
pub struct ChungLuBound {
    params: ChungLuBoundParams,
    beta: f64,
    zeta: f64,
}

impl ChungLuBound {
    pub fn new(params: ChungLuBoundParams) -> Result<Self> {
        params.validate()?;
        let beta = 1.0 / params.scale;
        Ok(ChungLuBound {
            params,
            beta,
            zeta: partial_zeta(params.n, beta),
        })
    }

    /// `min(1, exp(-d q α n / (i^β Σ_j j^{-β})))` for rank `i` in `1..=n`.
    pub fn at_rank(&self, i: u64) -> Result<f64> {
        let p = &self.params;
        if i == 0 || i > p.n {
            return Err(Error::param("i", "rank must lie in 1..=n"));
        }
        let exponent = p.min_degree * p.q * p.alpha * p.n as f64 / (libm::pow(i as f64, self.beta) * self.zeta);
        Ok(libm::exp(-exponent).min(1.0))
    }
}

pub fn cl_membership_bound(i: u64, params: ChungLuBoundParams) -> Result<f64> {
    ChungLuBound::new(params)?.at_rank(i)
}

/// Growth family of the certified rank prefix, by power-law scale `b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RankRegime {
    /// `b < 1`: ranks `o(n^b)`.
    SubPolynomial { b: f64 },
    /// `b = 1`: ranks `o(n / ln n)`.
    LogCorrected,
    /// `b > 1`: ranks `o(n)`.
    Linear,
}

impl RankRegime {
    pub fn tag(&self) -> &'static str {
        match self {
            RankRegime::SubPolynomial { .. } => "sub-polynomial ranks",
            RankRegime::LogCorrected => "log-corrected ranks",
            RankRegime::Linear => "linear ranks",
        }
    }

    /// The envelope `f(n)` the certified prefix is little-o of.
    pub fn envelope(&self, n: f64) -> f64 {
        match *self {
            RankRegime::SubPolynomial { b } => libm::pow(n, b),
            RankRegime::LogCorrected => n / libm::log(n),
            RankRegime::Linear => n,
        }
    }
}

pub fn cl_rank_threshold(b: f64) -> Result<RankRegime> {
    check_positive("b", b)?;
    Ok(if (b - 1.0).abs() <= 1e-12 {
        RankRegime::LogCorrected
    } else if b < 1.0 {
        RankRegime::SubPolynomial { b }
    } else {
        RankRegime::Linear
    })
}

/// Whether percolated Chung–Lu parameters admit a giant component:
/// `b ∈ (0, 2]`, or `b > 2` and `d q > (b - 1)(b - 2)`.
pub fn cl_giant_condition(b: f64, d: f64, q: f64) -> Result<bool> {
    check_positive("b", b)?;
    check_positive("d", d)?;
    check_positive("q", q)?;
    Ok(b <= 2.0 || d * q > (b - 1.0) * (b - 2.0))
}

/// Percolation threshold `Σ d_v / Σ d_v²` (inverse second-order average degree).
pub fn percolation_threshold_general(g: &Graph) -> Result<f64> {
    if g.edge_count() == 0 {
        return Err(Error::Edgeless);
    }
    let (sum, sum_sq) = g
        .degrees()
        .into_iter()
        .fold((0u64, 0u64), |(s, s2), d| (s + d as u64, s2 + (d * d) as u64));
    Ok(sum as f64 / sum_sq as f64)
}
