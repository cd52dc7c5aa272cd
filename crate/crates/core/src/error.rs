use alloc::string::String;
use core::fmt;

/// Which side of a conditioning split came up empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `x_v = 0`
    NodeInactive,
    /// `x_v = 1`
    NodeActive,
    /// No seed landed in the largest component.
    GiantInactive,
    /// Some seed landed in the largest component.
    GiantActive,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::NodeInactive => "x_v = 0",
            Branch::NodeActive => "x_v = 1",
            Branch::GiantInactive => "giant inactive",
            Branch::GiantActive => "giant active",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("node {node} out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("graph has no edges")]
    Edgeless,
    #[error("degenerate conditioning: branch `{branch}` received no samples in {trials} trials")]
    DegenerateConditioning { branch: Branch, trials: u64 },
    #[error("no giant component: mean percolated degree {0} <= 1")]
    Subcritical(f64),
    #[error("no giant component for Chung-Lu scale b = {b} with d*q = {dq}")]
    ChungLuSubcritical { b: f64, dq: f64 },
    #[error("mechanism `{0}` is not supported here")]
    UnsupportedMechanism(&'static str),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn check_probability(name: &'static str, p: f64) -> crate::Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::param(name, alloc::format!("{p} is not in [0, 1]")))
    }
}

/// Transmission rates live in (0, 1].
pub(crate) fn check_rate(q: f64) -> crate::Result<()> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(Error::param("q", alloc::format!("{q} is not in (0, 1]")))
    }
}

pub(crate) fn check_positive(name: &'static str, x: f64) -> crate::Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, alloc::format!("{x} must be positive and finite")))
    }
}
