mod common;

use grandnorm_core::{Metric, QuasiMetricSpace};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_ball_is_realized_by_a_critical_radius(s in common::space(12), r in 1e-3f64..20.0) {
        for x in 0..s.n() {
            let ball = s.ball(x, r).unwrap();
            let realized = s
                .critical_radii(x)
                .unwrap()
                .into_iter()
                .any(|rc| s.ball(x, rc).unwrap() == ball);
            prop_assert!(realized, "center {} radius {}", x, r);
        }
    }

    #[test]
    fn critical_radii_give_distinct_nested_balls(s in common::space(12)) {
        for x in 0..s.n() {
            let radii = s.critical_radii(x).unwrap();
            let balls: Vec<Vec<usize>> = radii.iter().map(|&r| s.ball(x, r).unwrap()).collect();
            for w in balls.windows(2) {
                prop_assert!(w[0].len() < w[1].len());
                prop_assert!(w[0].iter().all(|i| w[1].contains(i)));
            }
            prop_assert_eq!(balls.last().unwrap().len(), s.n());
            prop_assert_eq!(&balls[0], &vec![x]);
        }
    }

    #[test]
    fn balls_are_monotone_and_symmetric(s in common::space(10), r in 1e-3f64..10.0, t in 1.0f64..3.0) {
        for i in 0..s.n() {
            let small = s.ball(i, r).unwrap();
            let big = s.ball(i, r * t).unwrap();
            prop_assert!(small.iter().all(|j| big.contains(j)));
            prop_assert!(small.contains(&i));
            for &j in &small {
                prop_assert!(s.ball(j, r).unwrap().contains(&i));
            }
        }
    }

    #[test]
    fn structural_constants(s in common::space(10)) {
        prop_assert!(s.doubling_constant() >= 1.0);
        let k = s.quasi_triangle_constant();
        prop_assert!(k >= 1.0 && k.is_finite());
        for i in 0..s.n() {
            for j in 0..s.n() {
                for z in 0..s.n() {
                    if z != i && z != j && i != j {
                        prop_assert!(s.dist(i, j) <= k * (s.dist(i, z) + s.dist(z, j)) * (1.0 + 1e-12));
                    }
                }
            }
        }
    }
}

#[test]
fn snowflake_quasi_triangle_constant() {
    let s =
        QuasiMetricSpace::from_points_1d(vec![0.0, 0.5, 1.0], vec![1.0; 3], Metric::Snowflake(2.0))
            .unwrap();
    assert_eq!(s.quasi_triangle_constant(), 2.0);
}

#[test]
fn non_doubling_family_grows() {
    let doubling = |n: usize| {
        let x = (0..n).map(|i| i as f64).collect();
        let w = (0..n).map(|i| 2f64.powi(i as i32)).collect();
        QuasiMetricSpace::from_points_1d(x, w, Metric::Euclidean)
            .unwrap()
            .doubling_constant()
    };
    let (a, b, c) = (doubling(4), doubling(8), doubling(16));
    assert!(a < b && b < c, "{a} {b} {c}");
}

#[test]
fn uniform_grids_are_uniformly_doubling() {
    for level in 1..=8 {
        let d = QuasiMetricSpace::uniform_dyadic(level)
            .unwrap()
            .doubling_constant();
        assert!((1.0..=3.0).contains(&d), "level {level}: {d}");
    }
}
