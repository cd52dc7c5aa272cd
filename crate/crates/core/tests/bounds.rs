mod common;

use common::cycle;
use contagion_core::bounds::{
    cl_membership_bound, er_membership_bound, partial_zeta, percolation_threshold_general, solve_giant_fraction,
    ChungLuBoundParams,
};
use contagion_core::{Error, Graph};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn giant_fraction_solves_the_fixed_point(c in 1.0001f64..=5.0) {
        let y = solve_giant_fraction(c).unwrap().fraction;
        prop_assert!(y > 0.0 && y < 1.0);
        prop_assert!(((-c * y).exp() - (1.0 - y)).abs() < 1e-10);
    }

    #[test]
    fn giant_fraction_grows_with_mean_degree(c in 1.01f64..5.0, dc in 0.01f64..1.0) {
        prop_assert!(solve_giant_fraction(c).unwrap().fraction < solve_giant_fraction(c + dc).unwrap().fraction);
    }

    #[test]
    fn er_bound_is_a_probability_dominating_its_tail(d in 0u64..500, q in 0.01f64..=1.0, y in 0.0f64..1.0) {
        let b = er_membership_bound(d, q, y).unwrap();
        prop_assert!((0.0..=1.0).contains(&b));
        let tail = (-(d as f64) * q * y / 2.0).exp();
        prop_assert!(b >= tail.min(1.0) - 1e-15);
        prop_assert!(er_membership_bound(d + 1, q, y).unwrap() <= b);
    }

    #[test]
    fn chung_lu_bound_orders(rank in 1u64..1000, alpha in 0.05f64..0.95, beta_inv in 0.3f64..3.0, q in 0.05f64..=1.0) {
        let params = |alpha| ChungLuBoundParams { n: 1000, min_degree: 5.0, q, scale: beta_inv, alpha };
        let b = cl_membership_bound(rank, params(alpha)).unwrap();
        prop_assert!((0.0..=1.0).contains(&b));
        prop_assert!(cl_membership_bound(rank, params(alpha + 0.04)).unwrap() <= b);
        if rank < 1000 {
            prop_assert!(cl_membership_bound(rank + 1, params(alpha)).unwrap() >= b);
        }
    }
}

#[test]
fn no_giant_at_or_below_unit_mean_degree() {
    for c in [0.5, 1.0] {
        assert_eq!(solve_giant_fraction(c).unwrap().fraction, 0.0);
    }
    assert!(matches!(solve_giant_fraction(0.0), Err(Error::InvalidParameter { .. })));
}

#[test]
fn fraction_agrees_with_newton_iteration() {
    for c in [1.1, 1.5, 2.0, 3.0, 5.0] {
        let mut y: f64 = 0.9;
        for _ in 0..100 {
            let f = (-c * y).exp() - 1.0 + y;
            let df = 1.0 - c * (-c * y).exp();
            y -= f / df;
        }
        assert!((solve_giant_fraction(c).unwrap().fraction - y).abs() < 1e-9, "c = {c}");
    }
}

#[test]
fn partial_zeta_approaches_basel() {
    let s = partial_zeta(100_000, 2.0);
    let basel = std::f64::consts::PI.powi(2) / 6.0;
    assert!((basel - s) > 0.0 && (basel - s) < 1.0 / 99_999.0);
}

#[test]
fn percolation_threshold_against_degree_sums() {
    assert!((percolation_threshold_general(&cycle(10)).unwrap() - 0.5).abs() < 1e-15);
    let star = Graph::from_edges(6, (1..6).map(|v| (0, v))).unwrap();
    // Degrees 5,1,1,1,1,1: sum 10, sum of squares 30.
    assert!((percolation_threshold_general(&star).unwrap() - 10.0 / 30.0).abs() < 1e-15);
    let empty = Graph::from_edges(3, []).unwrap();
    assert!(matches!(percolation_threshold_general(&empty), Err(Error::Edgeless)));
}
