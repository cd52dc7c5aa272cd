mod common;

use common::{cycle, path};
use contagion_core::graph::generate_er;
use contagion_core::percolation::{conditional_count_distributions_many, conditional_giant_distributions};
use contagion_core::privacy::{
    hypothesis_test_error, push_through_mechanism, randomized_response_estimate, sample_laplace, tvd,
    wasserstein_infinity, wasserstein_mechanism_scale, MechanismSpec,
};
use contagion_core::trials::rng_from_seed;
use contagion_core::{Branch, CascadeParams, EmpiricalDistribution, Error, Graph};
use proptest::prelude::*;

fn distribution() -> impl Strategy<Value = EmpiricalDistribution> {
    proptest::collection::btree_map(-20i64..20, 1u64..50, 1..7)
        .prop_map(|m| EmpiricalDistribution::from_counts(m).unwrap())
}

fn half_l1(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let support: std::collections::BTreeSet<i64> = a.atoms().iter().chain(b.atoms()).map(|x| x.0).collect();
    support
        .into_iter()
        .map(|v| (a.mass_at(v) - b.mass_at(v)).abs())
        .sum::<f64>()
        / 2.0
}

fn shifted(d: &EmpiricalDistribution, k: i64) -> EmpiricalDistribution {
    EmpiricalDistribution::from_atoms(d.atoms().iter().map(|&(v, p)| (v + k, p)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tvd_is_a_metric(a in distribution(), b in distribution(), c in distribution()) {
        let ab = tvd(&a, &b);
        prop_assert!((ab - half_l1(&a, &b)).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        prop_assert!((ab - tvd(&b, &a)).abs() < 1e-15);
        prop_assert!(tvd(&a, &a) < 1e-15);
        prop_assert!(tvd(&a, &c) <= ab + tvd(&b, &c) + 1e-12);
        let r = hypothesis_test_error(&a, &b);
        prop_assert!((r.test_error - (1.0 - r.tvd)).abs() < 1e-15);
    }

    #[test]
    fn wasserstein_basic_laws(a in distribution(), b in distribution(), k in -10i64..10) {
        let w = wasserstein_infinity(&a, &b);
        prop_assert_eq!(w, wasserstein_infinity(&b, &a));
        prop_assert_eq!(wasserstein_infinity(&a, &a), 0.0);
        prop_assert_eq!(wasserstein_infinity(&a, &shifted(&a, k)), k.abs() as f64);
        prop_assert!(w + 1e-9 >= (a.mean() - b.mean()).abs());
        let span = (a.max_value().max(b.max_value()) - a.min_value().min(b.min_value())) as f64;
        prop_assert!(w <= span);
        prop_assert!(w >= (a.min_value() - b.min_value()).abs() as f64);
        prop_assert!(w >= (a.max_value() - b.max_value()).abs() as f64);
    }

    #[test]
    fn push_through_matches_closed_form(a in distribution(), scale in 0.2f64..6.0) {
        let n = 40u64;
        let out = push_through_mechanism(&a, &MechanismSpec::laplace(scale), n).unwrap();
        let total: f64 = out.atoms().iter().map(|x| x.1).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        let cdf = |t: f64| if t < 0.0 { 0.5 * (t / scale).exp() } else { 1.0 - 0.5 * (-t / scale).exp() };
        // Atoms away from the folded tails.
        let reach = (12.0 * scale).floor() as i64 - 1;
        for k in (a.max_value() - reach)..=(a.min_value() + reach) {
            let exact: f64 = a.atoms().iter().map(|&(x, p)| p * (cdf(k as f64 + 0.5 - x as f64) - cdf(k as f64 - 0.5 - x as f64))).sum();
            prop_assert!((out.mass_at(k) - exact).abs() < 1e-9, "atom {}: {} vs {}", k, out.mass_at(k), exact);
        }
    }

    #[test]
    fn clamped_push_through_stays_in_range(a in distribution(), scale in 0.2f64..6.0) {
        let n = 10u64;
        let out = push_through_mechanism(&a, &MechanismSpec::Laplace { scale, clamp: true }, n).unwrap();
        prop_assert!(out.min_value() >= 0 && out.max_value() <= n as i64);
        let cdf = |t: f64| if t < 0.0 { 0.5 * (t / scale).exp() } else { 1.0 - 0.5 * (-t / scale).exp() };
        let below: f64 = a.atoms().iter().map(|&(x, p)| p * cdf(0.5 - x as f64)).sum();
        // Tails past twelve scales are folded, moving at most this much.
        prop_assert!((out.mass_at(0) - below).abs() <= (-12.0f64).exp());
    }
}

#[test]
fn laplace_samples_pass_kolmogorov_smirnov() {
    let (scale, n) = (3.0, 100_000usize);
    let mut rng = rng_from_seed(42);
    let mut xs: Vec<f64> = (0..n).map(|_| sample_laplace(&mut rng, scale)).collect();
    xs.sort_by(f64::total_cmp);
    let cdf = |t: f64| {
        if t < 0.0 {
            0.5 * (t / scale).exp()
        } else {
            1.0 - 0.5 * (-t / scale).exp()
        }
    };
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - f)
        })
        .fold(0.0, f64::max);
    assert!(d < 1.628 / (n as f64).sqrt(), "KS statistic {d}");

    let mean = xs.iter().sum::<f64>() / n as f64;
    let mean_abs = xs.iter().map(|x| x.abs()).sum::<f64>() / n as f64;
    assert!(
        mean.abs() < 4.0 * scale * 2f64.sqrt() / (n as f64).sqrt(),
        "mean {mean}"
    );
    assert!(
        (mean_abs - scale).abs() < 4.0 * scale / (n as f64).sqrt(),
        "mean |noise| {mean_abs}"
    );
}

#[test]
fn randomized_response_is_unbiased() {
    let bits: Vec<bool> = (0..200).map(|i| i % 5 < 2).collect();
    let truth = 80.0;
    let runs = 4000;
    let est: Vec<f64> = (0..runs)
        .map(|s| randomized_response_estimate(&bits, 0.3, s).unwrap().estimate)
        .collect();
    let mean = est.iter().sum::<f64>() / runs as f64;
    let sd = (est.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (runs - 1) as f64).sqrt();
    assert!((mean - truth).abs() < 4.0 * sd / (runs as f64).sqrt(), "{mean} ± {sd}");
}

#[test]
fn node_distance_dominates_the_threshold_gap() {
    let g = generate_er(500, 5.0 / 500.0, 1).unwrap();
    let params = CascadeParams::new(0.3, 1);
    let nodes: Vec<usize> = (0..20).collect();
    let (trials, seed) = (1500, 12);
    // Same master seed, so both views come from the same simulated worlds.
    let split = conditional_giant_distributions(&g, &params, trials, seed).unwrap();
    let cond = conditional_count_distributions_many(&g, &params, &nodes, trials, seed).unwrap();
    let (lo, hi) = (split.theta_inactive(), split.theta_active());
    assert!(hi > lo, "no gap between {lo} and {hi}");
    let mut checked = 0;
    for c in cond.into_iter().flatten() {
        let w = wasserstein_infinity(&c.given_inactive, &c.given_active);
        if (c.given_inactive.cdf(lo) - c.given_active.cdf(lo)).abs() > 1e-12 {
            assert!(w >= (hi - lo) as f64, "node {}: {w} < {}", c.node, hi - lo);
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn mechanism_scale_reports_degenerate_nodes() {
    // Edge 0-1 plus an isolated node, everything transmits, two seeds: node 0
    // is always reached while node 2 is missed when the seeds are {0, 1}.
    let g = Graph::from_edges(3, [(0, 1)]).unwrap();
    let params = CascadeParams::new(1.0, 2);
    let scale = wasserstein_mechanism_scale(&g, &params, &[0, 2], 600, 4).unwrap();
    assert_eq!(scale.degenerate, [(0, Branch::NodeInactive)]);
    assert_eq!(scale.per_node.len(), 1);
    // Node 2 inactive: X = 2. Active: X = 3.
    assert_eq!(scale.sensitivity, 1.0);
    let err = wasserstein_mechanism_scale(&g, &params, &[0, 1], 600, 4).unwrap_err();
    assert!(matches!(
        err,
        Error::DegenerateConditioning {
            branch: Branch::NodeInactive,
            ..
        }
    ));
}

#[test]
fn disjoint_edges_need_no_noise() {
    let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
    let scale = wasserstein_mechanism_scale(&g, &CascadeParams::new(1.0, 1), &[0, 1, 2, 3], 400, 9).unwrap();
    assert_eq!(scale.sensitivity, 0.0);
    assert_eq!(scale.mean_abs_noise(1.0), 0.0);
}

#[test]
fn path_node_distances_are_positive() {
    for g in [path(5), cycle(6)] {
        let scale = wasserstein_mechanism_scale(&g, &CascadeParams::new(0.5, 1), &[0, 1, 2], 3000, 2).unwrap();
        assert!(scale.sensitivity >= 1.0);
        assert!(scale.per_node.iter().all(|d| d.distance <= g.node_count() as f64));
    }
}
