//! Seeded random spaces, exponents and fields for the verify suites.

use grandnorm_core::{Exponent, Field, Metric, MorreyExponent, QuasiMetricSpace};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Rng8 = ChaCha8Rng;

fn log_uniform(rng: &mut Rng8, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// A space with `2..=max_n` points: a weighted line, a snowflaked line, a
/// planar cloud or a uniform dyadic grid.
pub fn space(rng: &mut Rng8, max_n: usize) -> QuasiMetricSpace {
    let n = rng.random_range(2..=max_n.max(2));
    let weights: Vec<f64> = (0..n).map(|_| log_uniform(rng, 1e-3, 2.0)).collect();
    let built = match rng.random_range(0..4) {
        0 | 1 => {
            let mut x = 0.0;
            let points = (0..n)
                .map(|_| {
                    x += log_uniform(rng, 1e-3, 1.0);
                    x
                })
                .collect();
            let metric = if rng.random_bool(0.5) {
                Metric::Euclidean
            } else {
                Metric::Snowflake(rng.random_range(0.3..1.0))
            };
            QuasiMetricSpace::from_points_1d(points, weights, metric)
        }
        2 => {
            let side = (n as f64).sqrt().ceil() as usize;
            let coords = (0..n)
                .flat_map(|i| [(i % side) as f64, (i / side) as f64])
                .map(|c| c + rng.random_range(0.0..0.9))
                .collect();
            QuasiMetricSpace::from_coords(coords, 2, weights, Metric::Euclidean)
        }
        _ => QuasiMetricSpace::uniform_dyadic(rng.random_range(1..=max_n.max(2).ilog2())),
    };
    built.expect("generated spaces are valid")
}

/// Exponent values in a random sub-interval of `[lo, hi]`; constant with
/// probability 1/5.
pub fn exponent(rng: &mut Rng8, n: usize, lo: f64, hi: f64) -> Exponent {
    let a = rng.random_range(lo..hi);
    let b = rng.random_range(lo..hi);
    let (a, b) = (a.min(b), a.max(b));
    let values = if rng.random_bool(0.2) || a == b {
        vec![a; n]
    } else {
        (0..n).map(|_| rng.random_range(a..=b)).collect()
    };
    Exponent::new(values).expect("exponent values are above 1")
}

pub fn constant_exponent(rng: &mut Rng8, n: usize, lo: f64, hi: f64) -> Exponent {
    Exponent::constant(n, rng.random_range(lo..hi)).expect("exponent value is above 1")
}

pub fn lambda(rng: &mut Rng8, n: usize) -> MorreyExponent {
    MorreyExponent::new((0..n).map(|_| rng.random_range(0.0..=1.0)).collect())
        .expect("values in [0, 1]")
}

/// Signed values spread over six decades, about one in ten zero.
pub fn field(rng: &mut Rng8, n: usize) -> Field {
    let values = (0..n)
        .map(|_| {
            if rng.random_bool(0.1) {
                0.0
            } else {
                let v = log_uniform(rng, 1e-3, 1e3);
                if rng.random_bool(0.5) {
                    v
                } else {
                    -v
                }
            }
        })
        .collect();
    Field::new(values).expect("finite values")
}

/// Like [`field`] with at least one nonzero value.
pub fn nonzero_field(rng: &mut Rng8, n: usize) -> Field {
    let f = field(rng, n);
    if !f.is_zero() {
        return f;
    }
    let mut values = f.into_values();
    values[rng.random_range(0..n)] = log_uniform(rng, 1e-3, 1e3);
    Field::new(values).expect("finite values")
}
