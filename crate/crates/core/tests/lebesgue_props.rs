mod common;

use common::rel;
use grandnorm_core::*;
use proptest::prelude::*;

const TOL: f64 = DEFAULT_TOL;

fn instance(max_n: usize) -> impl Strategy<Value = (QuasiMetricSpace, Exponent, Field)> {
    common::space(max_n).prop_flat_map(|s| {
        let n = s.n();
        (
            Just(s),
            common::exponent(n, 1.05, 6.0),
            common::nonzero_field(n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn unit_modular_identity((s, p, f) in instance(24)) {
        let norm = luxemburg_norm(&s, &p, &f, TOL).unwrap();
        let m = modular(&s, &p, &f.scaled(1.0 / norm)).unwrap();
        prop_assert!((m - 1.0).abs() <= 10.0 * TOL * p.max() + 1e-13, "modular {}", m);
    }

    #[test]
    fn norm_modular_inequalities((s, p, f) in instance(24)) {
        let norm = luxemburg_norm(&s, &p, &f, TOL).unwrap();
        let m = modular(&s, &p, &f).unwrap();
        let (lo, hi) = if norm <= 1.0 {
            (norm.powf(p.max()), norm.powf(p.min()))
        } else {
            (norm.powf(p.min()), norm.powf(p.max()))
        };
        prop_assert!(lo <= m * (1.0 + 1e-9) && m <= hi * (1.0 + 1e-9), "{} <= {} <= {}", lo, m, hi);
    }

    #[test]
    fn homogeneity_and_triangle((s, p, f) in instance(16), alpha in -1e3f64..1e3, seed in 0u64..1000) {
        let norm = luxemburg_norm(&s, &p, &f, TOL).unwrap();
        let scaled = luxemburg_norm(&s, &p, &f.scaled(alpha), TOL).unwrap();
        prop_assert!((scaled - alpha.abs() * norm).abs() <= 1e-10 * alpha.abs() * norm);
        let g = Field::new((0..s.n()).map(|i| ((i as u64 * 31 + seed) % 17) as f64 - 8.0).collect()).unwrap();
        let sum = Field::new(f.values().iter().zip(g.values()).map(|(a, b)| a + b).collect()).unwrap();
        let ng = luxemburg_norm(&s, &p, &g, TOL).unwrap();
        let nsum = luxemburg_norm(&s, &p, &sum, TOL).unwrap();
        prop_assert!(nsum <= (norm + ng) * (1.0 + 1e-10));
    }

    #[test]
    fn holder_inequality((s, p, f) in instance(24), seed in 0u64..1000) {
        let g = Field::new((0..s.n()).map(|i| (((i as u64 + seed) * 2654435761) % 1000) as f64 / 100.0 - 5.0).collect()).unwrap();
        let lhs = pairing(&s, &f, &g).unwrap().abs();
        let rhs = holder_constant(&p)
            * luxemburg_norm(&s, &p, &f, TOL).unwrap()
            * luxemburg_norm(&s, &p.conjugate(), &g, TOL).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-10), "{} > {}", lhs, rhs);
    }

    #[test]
    fn embedding_for_ordered_exponents((s, p, f) in instance(24), bump in proptest::collection::vec(0.0f64..3.0, 24)) {
        let q = Exponent::new(p.values().iter().zip(&bump).map(|(p, b)| p + b).collect()).unwrap();
        let np = luxemburg_norm(&s, &p, &f, TOL).unwrap();
        let nq = luxemburg_norm(&s, &q, &f, TOL).unwrap();
        prop_assert!(np <= embedding_constant(&s) * nq * (1.0 + 1e-10));
    }

    #[test]
    fn conjugate_is_an_involution(p in common::exponent(16, 1.01, 20.0)) {
        let back = p.conjugate().conjugate();
        for (a, b) in back.values().iter().zip(p.values()) {
            prop_assert!(rel(*a, *b) < 1e-12);
        }
        let c = p.conjugate();
        prop_assert!(rel(c.min(), p.max() / (p.max() - 1.0)) < 1e-15);
        prop_assert!(rel(c.max(), p.min() / (p.min() - 1.0)) < 1e-15);
    }

    #[test]
    fn shift_commutes_with_bounds(p in common::exponent(16, 1.5, 5.0), t in 0.01f64..0.99, k in 1usize..16) {
        let c = t * (p.min() - 1.0);
        let idx: Vec<usize> = (0..k).collect();
        let (lo, hi) = p.bounds(&idx).unwrap();
        let (slo, shi) = p.shift(c).unwrap().bounds(&idx).unwrap();
        prop_assert_eq!((slo, shi), (lo - c, hi - c));
    }
}

#[test]
fn bisection_agrees_with_closed_form() {
    let s = QuasiMetricSpace::uniform_dyadic(6).unwrap();
    for q in [1.1, 2.0, 3.7, 12.0] {
        let p = Exponent::constant(64, q).unwrap();
        let f = Field::new(
            (0..64)
                .map(|i| ((i * 13) % 7) as f64 * 10f64.powi(i % 5 - 2))
                .collect(),
        )
        .unwrap();
        let a = luxemburg_norm(&s, &p, &f, TOL).unwrap();
        let b = luxemburg_norm_bisection(&s, &p, &f, TOL).unwrap();
        assert!(rel(b, a) < 1e-11, "q={q}: {a} vs {b}");
    }
}
