//! Seeded invariant suites. Each suite draws independent random instances,
//! checks one inequality or identity per instance and reports the number of
//! violations together with the worst observed score.

use anyhow::{bail, Result};
use grandnorm_core::morrey::shifted_morrey_norms;
use grandnorm_core::predual::block_ratio;
use grandnorm_core::*;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::random::{self, Rng8};

const TOL: f64 = DEFAULT_TOL;

/// Outcome of one instance: whether the invariant held, and a score whose
/// maximum over the suite is reported (a ratio that must stay below 1, or an
/// error that must stay small).
struct Check {
    ok: bool,
    score: f64,
    /// Split constant, collected by the block suite.
    a: Option<f64>,
}

impl Check {
    fn ratio(lhs: f64, rhs: f64, slack: f64) -> Self {
        let score = if rhs > 0.0 {
            lhs / rhs
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        Self {
            ok: lhs <= rhs * (1.0 + slack),
            score,
            a: None,
        }
    }

    fn error(err: f64, bound: f64) -> Self {
        Self {
            ok: err <= bound,
            score: err,
            a: None,
        }
    }

    fn flag(ok: bool) -> Self {
        Self {
            ok,
            score: if ok { 0.0 } else { 1.0 },
            a: None,
        }
    }

    fn and(self, other: Check) -> Self {
        Self {
            ok: self.ok && other.ok,
            score: self.score.max(other.score),
            a: self.a.or(other.a),
        }
    }
}

type SuiteFn = fn(&mut Rng8) -> grandnorm_core::Result<Check>;

struct Suite {
    name: &'static str,
    anchor: &'static str,
    invariant: &'static str,
    check: SuiteFn,
}

const SUITES: &[Suite] = &[
    Suite {
        name: "luxemburg-closed-form",
        anchor: "Luxemburg norm of a constant exponent",
        invariant: "relative error against (sum w |f|^p)^(1/p) at most 1e-10",
        check: luxemburg_closed_form,
    },
    Suite {
        name: "unit-modular",
        anchor: "Luxemburg norm as the root of the modular",
        invariant: "S(f / ||f||) = 1 within tolerance",
        check: unit_modular,
    },
    Suite {
        name: "norm-modular",
        anchor: "norm-modular inequalities",
        invariant: "min(||f||^p-, ||f||^p+) <= S(f) <= max(||f||^p-, ||f||^p+)",
        check: norm_modular,
    },
    Suite {
        name: "holder",
        anchor: "Hoelder inequality",
        invariant: "|<f, g>| <= (1 + 1/p- - 1/p+) ||f||_p ||g||_p'",
        check: holder,
    },
    Suite {
        name: "embedding",
        anchor: "embedding of variable Lebesgue spaces",
        invariant: "||f||_p <= (1 + mu(X)) ||f||_q for p <= q",
        check: embedding,
    },
    Suite {
        name: "quasi-metric",
        anchor: "spaces of homogeneous type",
        invariant: "K >= 1, doubling >= 1, ball measures grow to mu(X)",
        check: quasi_metric,
    },
    Suite {
        name: "grid-refinement",
        anchor: "grand Morrey norm as a supremum over shifts",
        invariant: "refining the shift grid never decreases the grand norm",
        check: grid_refinement,
    },
    Suite {
        name: "lambda-collapse",
        anchor: "grand Morrey norm with lambda = 0",
        invariant: "equals the grand Lebesgue norm exactly",
        check: lambda_collapse,
    },
    Suite {
        name: "morrey-axioms",
        anchor: "Morrey and grand Morrey norms",
        invariant: "homogeneity and triangle inequality",
        check: morrey_axioms,
    },
    Suite {
        name: "grand-equivalence",
        anchor: "equivalent grand Morrey norm",
        invariant: "constant exponents: both grand norms agree to 1e-12",
        check: grand_equivalence,
    },
    Suite {
        name: "embedding-chain",
        anchor: "embeddings between Morrey and grand Morrey spaces",
        invariant: "||f||_(p-c) <= C2 ||f||_grand <= C2 C1 ||f||_p with computed constants",
        check: embedding_chain,
    },
    Suite {
        name: "truncation",
        anchor: "truncation and tail of a function",
        invariant: "truncate + tail = f and |truncate| + |tail| = |f| bitwise",
        check: truncation,
    },
    Suite {
        name: "tail-approximation",
        anchor: "closure of bounded functions",
        invariant: "||tail(f, N)|| <= 2 ||f - truncate(f, N/2)||",
        check: tail_approximation,
    },
    Suite {
        name: "block-certification",
        anchor: "blocks and their dyadic splitting",
        invariant: "normalized and split blocks certify; parts sum bitwise; max A <= 2 median A on a fixed space",
        check: block_certification,
    },
    Suite {
        name: "dyadic-regroup",
        anchor: "dyadic regrouping of block decompositions",
        invariant: "exact reconstruction, dyadic shifts, cost inflation at most 4 max(A, 1)",
        check: dyadic_regroup_suite,
    },
    Suite {
        name: "h-sandwich",
        anchor: "block space norm bounds",
        invariant: "lower <= c_p upper",
        check: sandwich,
    },
    Suite {
        name: "pairing-bound",
        anchor: "duality between block space and grand space",
        invariant: "|<f, sum l_j b_j>| <= c_p ||f||_L sum |l_j|",
        check: pairing_bound,
    },
    Suite {
        name: "script-l-dominance",
        anchor: "grand norm over shifts of p",
        invariant: "every weighted shifted norm on the grid is at most the grand norm",
        check: script_l_dominance,
    },
];

#[derive(Serialize)]
pub struct SuiteEntry {
    pub name: &'static str,
    pub anchor: &'static str,
    pub invariant: &'static str,
}

pub fn listing() -> Vec<SuiteEntry> {
    SUITES
        .iter()
        .map(|s| SuiteEntry {
            name: s.name,
            anchor: s.anchor,
            invariant: s.invariant,
        })
        .collect()
}

#[derive(Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub anchor: &'static str,
    pub instances: usize,
    pub violations: usize,
    pub errors: usize,
    pub first_error: Option<String>,
    pub worst: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_constant: Option<SplitConstant>,
    pub passed: bool,
}

/// Spread of the achieved split constants over a suite.
#[derive(Serialize)]
pub struct SplitConstant {
    pub max: f64,
    pub median: f64,
    pub stable: bool,
}

#[derive(Serialize)]
pub struct Ledger {
    pub seed: u64,
    pub instances: usize,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

fn instance_rng(seed: u64, suite: usize, instance: usize) -> Rng8 {
    let mut rng = Rng8::seed_from_u64(seed);
    rng.set_stream(((suite as u64) << 32) | instance as u64);
    rng
}

fn run_suite(index: usize, suite: &Suite, seed: u64, instances: usize) -> SuiteResult {
    let outcomes: Vec<grandnorm_core::Result<Check>> = (0..instances)
        .into_par_iter()
        .map(|i| (suite.check)(&mut instance_rng(seed, index, i)))
        .collect();
    let mut violations = 0;
    let mut errors = 0;
    let mut first_error = None;
    let mut worst = 0.0f64;
    let mut constants = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(check) => {
                violations += usize::from(!check.ok);
                worst = worst.max(check.score);
                constants.extend(check.a);
            }
            Err(err) => {
                errors += 1;
                first_error.get_or_insert_with(|| err.to_string());
            }
        }
    }
    let split_constant = (!constants.is_empty()).then(|| {
        constants.sort_by(f64::total_cmp);
        let max = *constants.last().expect("nonempty");
        let median = constants[constants.len() / 2];
        SplitConstant {
            max,
            median,
            stable: max <= 2.0 * median,
        }
    });
    let stable = split_constant.as_ref().is_none_or(|s| s.stable);
    SuiteResult {
        name: suite.name,
        anchor: suite.anchor,
        instances,
        violations,
        errors,
        first_error,
        worst,
        passed: violations == 0 && errors == 0 && stable,
        split_constant,
    }
}

pub fn run(name: &str, seed: u64, instances: usize) -> Result<Ledger> {
    let selected: Vec<(usize, &Suite)> = SUITES
        .iter()
        .enumerate()
        .filter(|(_, s)| name == "all" || s.name == name)
        .collect();
    if selected.is_empty() {
        bail!("unknown suite {name:?}; see `verify --list`");
    }
    let suites: Vec<SuiteResult> = selected
        .iter()
        .map(|&(i, s)| run_suite(i, s, seed, instances))
        .collect();
    let passed = suites.iter().all(|s| s.passed);
    Ok(Ledger {
        seed,
        instances,
        suites,
        passed,
    })
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn luxemburg_closed_form(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let s = random::space(rng, 32);
    let p = random::constant_exponent(rng, s.n(), 1.05, 8.0);
    let f = random::nonzero_field(rng, s.n());
    let q = p.min();
    let max = f.max_abs();
    let sum: f64 = s
        .weights()
        .iter()
        .zip(f.values())
        .map(|(w, v)| w * (v.abs() / max).powf(q))
        .sum();
    let exact = max * sum.powf(1.0 / q);
    Ok(Check::error(
        rel(luxemburg_norm(&s, &p, &f, TOL)?, exact),
        1e-10,
    ))
}

fn unit_modular(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let s = random::space(rng, 32);
    let p = random::exponent(rng, s.n(), 1.05, 6.0);
    let f = random::nonzero_field(rng, s.n());
    let norm = luxemburg_norm(&s, &p, &f, TOL)?;
    let m = modular(&s, &p, &f.scaled(1.0 / norm))?;
    Ok(Check::error((m - 1.0).abs(), 10.0 * TOL * p.max() + 1e-13))
}

fn norm_modular(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let s = random::space(rng, 32);
    let p = random::exponent(rng, s.n(), 1.05, 6.0);
    let f = random::nonzero_field(rng, s.n()).scaled(10f64.powf(rng.random_range(-3.0..3.0)));
    let norm = luxemburg_norm(&s, &p, &f, TOL)?;
    let m = modular(&s, &p, &f)?;
    let (a, b) = (norm.powf(p.min()), norm.powf(p.max()));
    Ok(Check::ratio(a.min(b), m, 1e-9).and(Check::ratio(m, a.max(b), 1e-9)))
}

fn holder(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let s = random::space(rng, 32);
    let p = random::exponent(rng, s.n(), 1.05, 6.0);
    let f = random::field(rng, s.n());
    let g = random::field(rng, s.n());
    let lhs = pairing(&s, &f, &g)?.abs();
    let rhs = holder_constant(&p)
        * luxemburg_norm(&s, &p, &f, TOL)?
        * luxemburg_norm(&s, &p.conjugate(), &g, TOL)?;
    Ok(Check::ratio(lhs, rhs, 1e-10))
}

fn embedding(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let s = random::space(rng, 32);
    let p = random::exponent(rng, s.n(), 1.05, 6.0);
    let q = Exponent::new(
        p.values()
            .iter()
            .map(|v| v + rng.random_range(0.0..3.0))
            .collect(),
    )?;
    let f = random::field(rng, s.n());
    let lhs = luxemburg_norm(&s, &p, &f, TOL)?;
    let rhs = embedding_constant(&s) * luxemburg_norm(&s, &q, &f, TOL)?;
    Ok(Check::ratio(lhs, rhs, 1e-10))
}

fn quasi_metric(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let s = random::space(rng, 24);
    let k = s.quasi_triangle_constant();
    let d = s.doubling_constant();
    let mut ok = k >= 1.0 && d >= 1.0;
    for x in 0..s.n() {
        let radii = s.critical_radii(x)?;
        let measures = radii
            .iter()
            .map(|&r| s.ball_measure(x, r))
            .collect::<grandnorm_core::Result<Vec<_>>>()?;
        ok &= measures.windows(2).all(|w| w[0] < w[1]);
        ok &= measures.last().is_some_and(|&m| rel(m, s.mu_x()) < 1e-12);
    }
    Ok(Check {
        ok,
        score: k,
        a: None,
    })
}

fn morrey_instance(rng: &mut Rng8) -> (QuasiMetricSpace, Exponent, MorreyExponent, Field) {
    let s = random::space(rng, 12);
    let p = random::exponent(rng, s.n(), 1.6, 4.0);
    let lam = random::lambda(rng, s.n());
    let f = random::field(rng, s.n());
    (s, p, lam, f)
}

fn grid_refinement(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let (s, p, lam, f) = morrey_instance(rng);
    let params = GrandParams::new(rng.random_range(0.2..3.0), rng.random_range(2..10), 1e-2)?;
    let coarse = grand_morrey_norm(&s, &p, &lam, &params, &f, TOL)?.norm;
    let fine = grand_morrey_norm(&s, &p, &lam, &params.refined(), &f, TOL)?.norm;
    Ok(Check::ratio(coarse, fine, 0.0))
}

fn lambda_collapse(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let (s, p, _, f) = morrey_instance(rng);
    let params = GrandParams::new(rng.random_range(0.2..3.0), 9, 1e-2)?;
    let a = grand_morrey_norm(&s, &p, &MorreyExponent::zero(s.n()), &params, &f, TOL)?;
    let b = grand_lebesgue_norm(&s, &p, &params, &f, TOL)?;
    Ok(Check::flag(a == b))
}

fn morrey_axioms(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let (s, p, lam, f) = morrey_instance(rng);
    let g = random::field(rng, s.n());
    let alpha = rng.random_range(-50.0..50.0);
    let sum = Field::new(
        f.values()
            .iter()
            .zip(g.values())
            .map(|(a, b)| a + b)
            .collect(),
    )?;
    let m = |h: &Field| morrey_norm(&s, &p, &lam, h, TOL);
    let (nf, ng) = (m(&f)?, m(&g)?);
    let triangle = Check::ratio(m(&sum)?, nf + ng, 1e-10);
    let scaled = m(&f.scaled(alpha))?;
    let homogeneity = Check::error(
        (scaled - alpha.abs() * nf).abs(),
        1e-10 * alpha.abs() * nf + 1e-300,
    );
    let params = GrandParams::new(1.0, 6, 1e-2)?;
    let gm = |h: &Field| grand_morrey_norm(&s, &p, &lam, &params, h, TOL).map(|r| r.norm);
    let grand = Check::ratio(gm(&sum)?, gm(&f)? + gm(&g)?, 1e-10);
    Ok(triangle.and(grand).and(Check {
        score: 0.0,
        ..homogeneity
    }))
}

fn grand_equivalence(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let s = random::space(rng, 12);
    let n = s.n();
    let p = random::constant_exponent(rng, n, 1.5, 4.0);
    let lam = MorreyExponent::constant(n, rng.random_range(0.0..=1.0))?;
    let f = random::field(rng, n);
    let params = GrandParams::new(1.0, 8, 1e-3)?;
    let a = grand_morrey_norm(&s, &p, &lam, &params, &f, TOL)?.norm;
    let b = equivalent_grand_norm(&s, &p, &lam, &params, &f, TOL)?.norm;
    Ok(Check::error(rel(a, b), 1e-12))
}

fn embedding_chain(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let (s, p, lam, f) = morrey_instance(rng);
    let params = GrandParams::new(rng.random_range(0.2..3.0), 8, 1e-2)?;
    let chain = embedding_chain_report(&s, &p, &lam, &params, &f, None, TOL)?;
    let score = chain.shifted_over_grand.max(chain.grand_over_morrey);
    Ok(Check {
        ok: chain.left_holds && chain.right_holds,
        score,
        a: None,
    })
}

fn truncation(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let f = random::field(rng, 40);
    let n = log_uniform(rng, 1e-6, 1e6);
    let a = truncate(&f, n)?;
    let b = tail(&f, n)?;
    let ok = a
        .values()
        .iter()
        .zip(b.values())
        .zip(f.values())
        .all(|((x, y), v)| x + y == *v && x.abs() + y.abs() == v.abs());
    Ok(Check::flag(ok))
}

fn log_uniform(rng: &mut Rng8, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

fn tail_approximation(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let (s, p, lam, f) = morrey_instance(rng);
    let params = GrandParams::new(1.0, 8, 1e-2)?;
    let n = log_uniform(rng, 1e-2, 1e3);
    let g = truncate(&f, n / 2.0)?;
    let diff = Field::new(
        f.values()
            .iter()
            .zip(g.values())
            .map(|(a, b)| a - b)
            .collect(),
    )?;
    let lhs = grand_morrey_norm(&s, &p, &lam, &params, &tail(&f, n)?, TOL)?.norm;
    let rhs = grand_morrey_norm(&s, &p, &lam, &params, &diff, TOL)?.norm;
    Ok(Check::ratio(lhs, 2.0 * rhs, 1e-12))
}

fn predual_instance(
    rng: &mut Rng8,
) -> grandnorm_core::Result<(QuasiMetricSpace, Exponent, ScriptLParams)> {
    let s = random::space(rng, 16);
    let p = random::exponent(rng, s.n(), 1.8, 4.0);
    let a = rng.random_range(0.1..0.9) * (p.min() - 1.0);
    let params = ScriptLParams::dyadic(rng.random_range(-2.0..2.0), a, 10)?;
    Ok((s, p, params))
}

/// Blocks on one fixed space and exponent, so that the split constants are
/// comparable across instances.
fn block_certification(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let s = QuasiMetricSpace::uniform_dyadic(5)?;
    let p = Exponent::new(
        (0..s.n())
            .map(|i| 2.2 + 0.6 * (i as f64 + 0.5) / s.n() as f64)
            .collect(),
    )?;
    let params = ScriptLParams::dyadic(1.0, 0.5 * (p.min() - 1.0), 12)?;
    let g = random::nonzero_field(rng, s.n());
    let kappa = rng.random_range(0.01..1.0) * params.a;
    let (_, b) = normalize_to_block(&s, &p, &params, &g, kappa)?;
    let mut ok = certify_block(&s, &p, &params, &b.values, kappa)?;
    let split = split_block(&s, &p, &params, &b.values, kappa)?;
    ok &= split
        .large
        .values
        .values()
        .iter()
        .zip(split.small.values.values())
        .zip(b.values.values())
        .all(|((x, y), v)| x + y == *v);
    for part in [&split.large, &split.small] {
        ok &= block_ratio(&s, &p, &params, &part.values, part.kappa)?
            <= split.achieved_a * (1.0 + grandnorm_core::predual::CERT_TOL);
    }
    Ok(Check {
        ok,
        score: split.achieved_a,
        a: Some(split.achieved_a),
    })
}

fn dyadic_regroup_suite(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let (s, p, params) = predual_instance(rng)?;
    let terms = (0..rng.random_range(1..5))
        .map(|_| {
            let g = random::nonzero_field(rng, s.n());
            let kappa = rng.random_range(0.01..1.0) * params.a;
            normalize_to_block(&s, &p, &params, &g, kappa)
        })
        .collect::<grandnorm_core::Result<Vec<_>>>()?;
    let dec = BlockDecomposition { terms };
    let out = dyadic_regroup(&s, &p, &params, &dec)?;
    let mut ok = out.decomposition.reconstruct(s.n()) == dec.reconstruct(s.n());
    for (_, b) in &out.decomposition.terms {
        let l = (params.a / b.kappa).log2().round() as i32;
        ok &= params.a * 0.5f64.powi(l) == b.kappa;
        ok &= certify_block(&s, &p, &params, &b.values, b.kappa)?;
    }
    let bound = 4.0 * out.max_split_a.max(1.0);
    Ok(Check {
        ok: ok && out.inflation <= bound * (1.0 + 1e-12),
        score: out.inflation / bound,
        a: None,
    })
}

fn sandwich(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let (s, p, params) = predual_instance(rng)?;
    let f = random::nonzero_field(rng, s.n());
    let upper = h_norm_upper(&s, &p, &params, &f)?;
    let lower = h_norm_lower(&s, &p, &params, &f, None)?;
    Ok(Check::ratio(lower.value, lower.c_p * upper.value, 1e-9))
}

fn pairing_bound(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let (s, p, params) = predual_instance(rng)?;
    let f = random::nonzero_field(rng, s.n());
    let g = random::nonzero_field(rng, s.n());
    let kappa = rng.random_range(0.01..1.0) * params.a;
    let (_, b) = normalize_to_block(&s, &p, &params, &g, kappa)?;
    let check = pairing_bound_check(
        &s,
        &p,
        &params,
        &f,
        &BlockDecomposition {
            terms: vec![(1.0, b)],
        },
    )?;
    let score = if check.bound > 0.0 {
        check.pairing.abs() / check.bound
    } else {
        0.0
    };
    Ok(Check {
        ok: check.holds,
        score,
        a: None,
    })
}

fn script_l_dominance(rng: &mut Rng8) -> grandnorm_core::Result<Check> {
    let (s, p, params) = predual_instance(rng)?;
    let f = random::field(rng, s.n());
    let report = script_l_norm(&s, &p, &params, &f)?;
    let mut worst = 0.0f64;
    for &k in &params.kappa_grid {
        let v = params.block_bound(k, p.min()) * luxemburg_norm(&s, &p.shift(k)?, &f, TOL)?;
        worst = worst.max(if report.norm > 0.0 {
            v / report.norm
        } else {
            v
        });
    }
    let shifted = shifted_morrey_norms(
        &s,
        &p,
        &MorreyExponent::zero(s.n()),
        &f,
        &params.kappa_grid,
        TOL,
    )?;
    let consistent = shifted
        .iter()
        .zip(&report.profile)
        .all(|(m, pt)| rel(*m, pt.norm) < 1e-12 || *m == pt.norm);
    Ok(Check {
        ok: worst <= 1.0 && consistent,
        score: worst,
        a: None,
    })
}
