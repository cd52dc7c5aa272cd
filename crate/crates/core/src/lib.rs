//! Independent-cascade contagion on random and real graphs, viewed through
//! bond percolation, and the privacy consequences of the resulting giant
//! component.
//!
//! The crate is `no_std` with `alloc`. Enable `parallel` to run Monte Carlo
//! trials on rayon; results are bit-identical either way because every trial
//! owns an RNG stream derived from `(master_seed, trial_index)` and all
//! reductions are over integer counters.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod attack;
pub mod bounds;
pub mod distribution;
mod error;
pub mod graph;
pub mod percolation;
pub mod privacy;
pub mod trials;
mod union_find;

pub use distribution::EmpiricalDistribution;
pub use error::{Branch, Error};
pub use graph::{Graph, NodeWeights};
pub use percolation::{CascadeParams, ComponentLabeling, MembershipEstimate, SeedPolicy, TriggeringSet};

pub type Result<T, E = Error> = core::result::Result<T, E>;
