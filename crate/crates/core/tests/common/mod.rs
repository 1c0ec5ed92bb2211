#![allow(dead_code)]

use grandnorm_core::io::values_from_spec;
use grandnorm_core::{Exponent, Field, Metric, QuasiMetricSpace};
use proptest::prelude::*;

/// Random 1-D space: sorted distinct points with positive weights.
pub fn space(max_n: usize) -> impl Strategy<Value = QuasiMetricSpace> {
    (1..=max_n).prop_flat_map(|n| {
        (
            proptest::collection::vec(0.0f64..10.0, n),
            proptest::collection::vec(0.01f64..2.0, n),
            prop_oneof![
                Just(Metric::Euclidean),
                (0.3f64..2.0).prop_map(Metric::Snowflake)
            ],
        )
            .prop_filter_map("distinct points", |(mut x, w, metric)| {
                x.sort_by(f64::total_cmp);
                x.dedup();
                if x.len() != w.len() {
                    return None;
                }
                QuasiMetricSpace::from_points_1d(x, w, metric).ok()
            })
    })
}

pub fn exponent(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = Exponent> {
    proptest::collection::vec(lo..hi, n).prop_map(|v| Exponent::new(v).unwrap())
}

/// Values spanning many orders of magnitude, with some exact zeros.
pub fn field(n: usize) -> impl Strategy<Value = Field> {
    proptest::collection::vec(
        prop_oneof![
            1 => Just(0.0),
            6 => (-8.0f64..8.0, any::<bool>()).prop_map(|(e, s)| if s { 10f64.powf(e) } else { -(10f64.powf(e)) }),
        ],
        n,
    )
    .prop_map(|v| Field::new(v).unwrap())
}

pub fn nonzero_field(n: usize) -> impl Strategy<Value = Field> {
    field(n).prop_filter("nonzero", |f| !f.is_zero())
}

pub fn generated(space: &QuasiMetricSpace, spec: &str) -> Vec<f64> {
    values_from_spec(spec, space).unwrap().unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
