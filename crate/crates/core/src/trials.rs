//! Reproducible trial streams.
//!
//! Trial `i` of a run with master seed `m` draws from
//! `ChaCha8Rng::seed_from_u64(child_seed(m, i))`, where `child_seed` is the
//! SplitMix64 finalizer applied to `m + (i + 1) * 0x9E3779B97F4A7C15`
//! (wrapping). A trial's randomness therefore depends only on `(m, i)`, never
//! on which worker ran it or in which order.

use alloc::vec::Vec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn child_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn trial_rng(master: u64, index: u64) -> TrialRng {
    rng_from_seed(child_seed(master, index))
}

/// Runs `f` for every trial index and returns the results in trial order.
#[cfg(feature = "parallel")]
pub fn map_trials<T, F>(trials: u64, master: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut TrialRng) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map(|i| f(i, &mut trial_rng(master, i)))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_trials<T, F>(trials: u64, master: u64, f: F) -> Vec<T>
where
    F: Fn(u64, &mut TrialRng) -> T,
{
    (0..trials).map(|i| f(i, &mut trial_rng(master, i))).collect()
}

/// Folds trials into per-worker accumulators and merges them.
///
/// `merge` must be commutative and associative on the values it sees (integer
/// counters are); otherwise results would depend on the worker schedule.
#[cfg(feature = "parallel")]
pub fn fold_trials<A, I, F, M>(trials: u64, master: u64, init: I, step: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, u64, &mut TrialRng) + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .fold(&init, |mut acc, i| {
            step(&mut acc, i, &mut trial_rng(master, i));
            acc
        })
        .reduce(&init, &merge)
}

#[cfg(not(feature = "parallel"))]
pub fn fold_trials<A, I, F, M>(trials: u64, master: u64, init: I, step: F, merge: M) -> A
where
    I: Fn() -> A,
    F: Fn(&mut A, u64, &mut TrialRng),
    M: Fn(A, A) -> A,
{
    let mut acc = init();
    for i in 0..trials {
        step(&mut acc, i, &mut trial_rng(master, i));
    }
    merge(init(), acc)
}
