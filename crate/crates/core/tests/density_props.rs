mod common;

use common::generated;
use grandnorm_core::*;
use proptest::prelude::*;

const TOL: f64 = DEFAULT_TOL;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn truncation_splits_exactly(f in common::field(40), n in 1e-6f64..1e6) {
        let a = truncate(&f, n).unwrap();
        let b = tail(&f, n).unwrap();
        for ((x, y), v) in a.values().iter().zip(b.values()).zip(f.values()) {
            prop_assert_eq!(x + y, *v);
            prop_assert_eq!(x.abs() + y.abs(), v.abs());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tail_is_controlled_by_any_bounded_approximant(level in 4u32..8, beta in 0.1f64..0.7, n in 2.0f64..50.0) {
        // ||tail(f, N)|| <= 2 ||f - g|| for g bounded by N/2; g = truncate(f, N/2).
        let s = QuasiMetricSpace::graded_dyadic(level).unwrap();
        let p = Exponent::constant(s.n(), 2.0).unwrap();
        let lam = MorreyExponent::zero(s.n());
        let params = GrandParams::new(1.0, 16, 1e-2).unwrap();
        let f = Field::new(generated(&s, &format!("power:{beta}"))).unwrap();
        let g = truncate(&f, n / 2.0).unwrap();
        let diff = Field::new(f.values().iter().zip(g.values()).map(|(a, b)| a - b).collect()).unwrap();
        let lhs = grand_morrey_norm(&s, &p, &lam, &params, &tail(&f, n).unwrap(), TOL).unwrap().norm;
        let rhs = grand_morrey_norm(&s, &p, &lam, &params, &diff, TOL).unwrap().norm;
        prop_assert!(lhs <= 2.0 * rhs * (1.0 + 1e-12));
    }
}

#[test]
fn tail_profiles_are_nonincreasing() {
    let s = QuasiMetricSpace::graded_dyadic(9).unwrap();
    let p = Exponent::new(generated(&s, "affine:2,1")).unwrap();
    let lam = MorreyExponent::new(generated(&s, "const:0.3")).unwrap();
    let params = GrandParams::new(1.0, 16, 1e-2).unwrap();
    for beta in ["0.25", "0.5", "0.75"] {
        let f = Field::new(generated(&s, &format!("power:{beta}"))).unwrap();
        let levels: Vec<f64> = (0..8).map(|k| 2f64.powi(k)).collect();
        let profile = tail_profile(&s, &p, &lam, &params, &f, &levels, TOL).unwrap();
        assert!(
            profile.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)),
            "{beta}: {profile:?}"
        );
    }
}

#[test]
fn bounded_tail_hits_zero() {
    let s = QuasiMetricSpace::uniform_dyadic(6).unwrap();
    let f = Field::new(generated(&s, "affine:-1,3")).unwrap();
    let profile = tail_profile(
        &s,
        &Exponent::constant(64, 2.0).unwrap(),
        &MorreyExponent::zero(64),
        &GrandParams::with_theta(1.0).unwrap(),
        &f,
        &[0.5, 1.0, f.max_abs()],
        TOL,
    )
    .unwrap();
    assert!(profile[0] > 0.0);
    assert_eq!(profile[2], 0.0);
}

#[test]
fn quarter_power_tail_obeys_analytic_bound() {
    // ||tail||_{2-k} = (4/(2+k))^{1/(2-k)} N^{-(2+k)/(2-k)}, so the grand
    // norm of the tail is at most 2/N.
    let s = QuasiMetricSpace::graded_dyadic(12).unwrap();
    let f = Field::new(generated(&s, "power:0.25")).unwrap();
    let levels = [2.0, 4.0, 8.0, 16.0];
    let profile = tail_profile(
        &s,
        &Exponent::constant(s.n(), 2.0).unwrap(),
        &MorreyExponent::zero(s.n()),
        &GrandParams::with_theta(1.0).unwrap(),
        &f,
        &levels,
        TOL,
    )
    .unwrap();
    for (n, v) in levels.iter().zip(&profile) {
        assert!(*v <= 2.0 / n, "N={n}: {v}");
    }
}

#[test]
fn small_shift_profile_of_bounded_function_decays_like_a_power() {
    let s = QuasiMetricSpace::uniform_dyadic(6).unwrap();
    let p = Exponent::constant(64, 2.0).unwrap();
    let theta = 1.0;
    let shifts = [0.1, 0.01, 0.001, 0.0001];
    let profile = small_c_profile(
        &s,
        &p,
        &MorreyExponent::zero(64),
        theta,
        &Field::new(vec![1.0; 64]).unwrap(),
        &shifts,
        TOL,
    )
    .unwrap();
    let slope = (profile[0] / profile[3]).ln() / (shifts[0] / shifts[3]).ln();
    let expected = theta / p.min();
    assert!((slope - expected).abs() <= 0.2 * expected, "slope {slope}");
}

fn family(levels: std::ops::RangeInclusive<u32>, f: &str, p: &str) -> Vec<DiagnosticLevel> {
    levels
        .map(|k| {
            let s = QuasiMetricSpace::graded_dyadic(k).unwrap();
            let n = s.n();
            let f = Field::new(generated(&s, f)).unwrap();
            let p = Exponent::new(generated(&s, p)).unwrap();
            DiagnosticLevel::new(s, p, MorreyExponent::zero(n), f).unwrap()
        })
        .collect()
}

#[test]
fn catalog_verdicts_agree() {
    let params = GrandParams::with_theta(1.0).unwrap();
    let config = DiagnosticConfig {
        regularity_check: false,
        ..Default::default()
    };
    for (witness, p, expected) in [
        ("const:1", "const:2", Verdict::Vanishes),
        ("power:0.25", "const:2", Verdict::Vanishes),
        ("power:0.5", "const:2", Verdict::Persists),
        ("power:0.5", "affine:2,1", Verdict::Persists),
    ] {
        let report = closure_diagnostic(&family(8..=10, witness, p), &params, &config).unwrap();
        assert_eq!(
            (report.tail.verdict, report.small_c.verdict),
            (expected, expected),
            "{witness} {p}"
        );
        assert!(report.agree);
    }
}

#[test]
fn regularity_of_smooth_family_is_reported() {
    let params = GrandParams::with_theta(1.0).unwrap();
    let report = closure_diagnostic(
        &family(5..=6, "power:0.25", "affine:2,1"),
        &params,
        &DiagnosticConfig::default(),
    )
    .unwrap();
    let reg = report.regularity.unwrap();
    assert!(reg.log_holder > 0.0 && reg.log_holder < 1.0, "{reg:?}");
    assert!(reg.log_holder_reciprocal_shifted > 0.0 && reg.log_holder_reciprocal_shifted < 1.0);
    assert!(reg.doubling >= 1.0);
}

#[test]
fn single_space_is_inconclusive() {
    let params = GrandParams::with_theta(1.0).unwrap();
    let config = DiagnosticConfig {
        regularity_check: false,
        ..Default::default()
    };
    let report =
        closure_diagnostic(&family(6..=6, "power:0.5", "const:2"), &params, &config).unwrap();
    assert_eq!(report.small_c.verdict, Verdict::Inconclusive);
    assert!(!report.agree);
}
