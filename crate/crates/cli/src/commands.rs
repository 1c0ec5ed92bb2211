//! The `norm`, `diag`, `predual` and `generate` subcommands.

use anyhow::{bail, Result};
use grandnorm_core::io::{space_from_spec, space_to_text, values_from_spec, values_to_text};
use grandnorm_core::predual::{block_ratio, default_probes, exhaustion};
use grandnorm_core::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::inputs::{self, KappaGrid};
use crate::{DensityArgs, GrandArgs, InputArgs, NormKind, PredualArgs, PredualKind};

/// Every report: what was run, with which settings, and the result.
#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub result: Value,
}

fn input_config(inputs: &InputArgs) -> Value {
    json!({
        "space": inputs.space,
        "exponent": inputs.exponent,
        "lambda": inputs.lambda,
        "function": inputs.function,
        "tol": inputs.tol,
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut base, extra) {
        a.extend(b);
    }
    base
}

pub fn norm(
    kind: NormKind,
    inputs: &InputArgs,
    grand: &GrandArgs,
    c: Option<f64>,
) -> Result<Report> {
    let space = inputs::space(&inputs.space)?;
    let p = inputs::exponent(&inputs.exponent, &space)?;
    let lambda = inputs::lambda(&inputs.lambda, &space)?;
    let f = inputs::function(&inputs.function, &space)?;
    let tol = inputs.tol;
    let params = GrandParams::new(grand.theta, grand.grid, grand.offset)?;
    let (name, result) = match kind {
        NormKind::Lebesgue => (
            "lebesgue",
            json!({
                "n": space.n(),
                "mu_x": space.mu_x(),
                "p_minus": p.min(),
                "p_plus": p.max(),
                "norm": luxemburg_norm(&space, &p, &f, tol)?,
                "modular": modular(&space, &p, &f)?,
            }),
        ),
        NormKind::Morrey => (
            "morrey",
            json!({
                "n": space.n(),
                "p_minus": p.min(),
                "p_plus": p.max(),
                "norm": morrey_norm(&space, &p, &lambda, &f, tol)?,
            }),
        ),
        NormKind::Grand => (
            "grand",
            serde_json::to_value(grand_morrey_norm(&space, &p, &lambda, &params, &f, tol)?)?,
        ),
        NormKind::Equivalent => {
            let eq = equivalent_grand_norm(&space, &p, &lambda, &params, &f, tol)?;
            let base = grand_morrey_norm(&space, &p, &lambda, &params, &f, tol)?;
            let ratio = if base.norm > 0.0 {
                eq.norm / base.norm
            } else {
                1.0
            };
            (
                "equivalent",
                json!({ "grand_norm": base.norm, "ratio": ratio, "report": eq }),
            )
        }
        NormKind::Embedding => (
            "embedding",
            serde_json::to_value(embedding_chain_report(
                &space, &p, &lambda, &params, &f, c, tol,
            )?)?,
        ),
    };
    let mut config = input_config(inputs);
    if !matches!(kind, NormKind::Lebesgue | NormKind::Morrey) {
        config = merge(
            config,
            json!({ "theta": grand.theta, "grid": grand.grid, "offset": grand.offset }),
        );
    }
    if let Some(c) = c {
        config = merge(config, json!({ "c": c }));
    }
    Ok(Report {
        command: format!("norm {name}"),
        config,
        result,
    })
}

fn family_space(family: &str, level: u32) -> Result<QuasiMetricSpace> {
    let family = family.split_once(':').map_or(family, |(kind, _)| kind);
    Ok(match family {
        "dyadic" | "graded" => QuasiMetricSpace::graded_dyadic(level)?,
        "uniform" => QuasiMetricSpace::uniform_dyadic(level)?,
        other => bail!("unknown family {other:?}; expected dyadic, graded or uniform"),
    })
}

pub fn density(args: &DensityArgs) -> Result<Report> {
    let range = inputs::range(&args.levels)?;
    if *range.start() < 1 {
        bail!("refinement levels start at 1");
    }
    let levels = range
        .clone()
        .map(|k| {
            let space = family_space(&args.family, k as u32)?;
            let p = inputs::exponent(&args.exponent, &space)?;
            let lambda = inputs::lambda(&args.lambda, &space)?;
            let f = inputs::function(&args.witness, &space)?;
            Ok(DiagnosticLevel::new(space, p, lambda, f)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let params = GrandParams::new(args.theta, args.grid, args.offset)?;
    let config = DiagnosticConfig {
        trend_tol: args.trend_tol,
        regularity_check: !args.no_regularity_check,
        tol: args.tol,
        ..Default::default()
    };
    let report = closure_diagnostic(&levels, &params, &config)?;
    Ok(Report {
        command: "diag density".into(),
        config: json!({
            "family": args.family,
            "levels": [range.start(), range.end()],
            "witness": args.witness,
            "exponent": args.exponent,
            "lambda": args.lambda,
            "theta": args.theta,
            "grid": args.grid,
            "offset": args.offset,
            "trend_tol": args.trend_tol,
            "regularity_check": !args.no_regularity_check,
            "tol": args.tol,
        }),
        result: serde_json::to_value(report)?,
    })
}

pub fn regularity(inputs: &InputArgs) -> Result<Report> {
    let space = inputs::space(&inputs.space)?;
    let p = inputs::exponent(&inputs.exponent, &space)?;
    let lambda = inputs::lambda(&inputs.lambda, &space)?;
    let reciprocal = p.reciprocal_values();
    let result = json!({
        "n": space.n(),
        "mu_x": space.mu_x(),
        "diameter": space.diameter(),
        "quasi_triangle": space.quasi_triangle_constant(),
        "doubling": space.doubling_constant(),
        "log_holder": log_holder_constant(&space, p.values())?,
        "log_holder_reciprocal": log_holder_constant(&space, &reciprocal)?,
        "log_holder_lambda": log_holder_constant(&space, lambda.values())?,
        "diening": diening_sup(&space, p.values())?,
    });
    Ok(Report {
        command: "diag regularity".into(),
        config: input_config(inputs),
        result,
    })
}

fn script_params(args: &PredualArgs, p: &Exponent) -> Result<ScriptLParams> {
    let a = args.a.unwrap_or(0.5 * (p.min() - 1.0));
    Ok(match inputs::kappa_grid(&args.grid)? {
        KappaGrid::Dyadic(levels) => ScriptLParams::dyadic(args.theta, a, levels)?,
        KappaGrid::List(list) => ScriptLParams::with_grid(args.theta, a, list)?,
    })
}

fn predual_on(
    kind: PredualKind,
    space: &QuasiMetricSpace,
    p: &Exponent,
    f: &Field,
    block: Option<&Field>,
    args: &PredualArgs,
) -> Result<Value> {
    let params = script_params(args, p)?;
    let kappa = args.kappa.unwrap_or(params.a / 3.0);
    Ok(match kind {
        PredualKind::ScriptL => serde_json::to_value(script_l_norm(space, p, &params, f)?)?,
        PredualKind::Hnorm => {
            let upper = h_norm_upper(space, p, &params, f)?;
            let probes = default_probes(p, &params, f)?;
            let lower = h_norm_lower(space, p, &params, f, Some(&probes))?;
            let gap = if upper.value > 0.0 {
                lower.value / (lower.c_p * upper.value)
            } else {
                0.0
            };
            json!({ "upper": upper, "lower": lower, "lower_over_cp_upper": gap, "sandwich": gap <= 1.0 + 1e-9 })
        }
        PredualKind::Pair => {
            let g = block.unwrap_or(f);
            let (coef, b) = normalize_to_block(space, p, &params, g, kappa)?;
            let ratio = block_ratio(space, p, &params, &b.values, kappa)?;
            let dec = BlockDecomposition {
                terms: vec![(coef, b)],
            };
            let check = pairing_bound_check(space, p, &params, f, &dec)?;
            json!({
                "blocks": [ledger_entry(coef, kappa, ratio, 1.0)],
                "check": check,
            })
        }
        PredualKind::Split => {
            let (coef, b) = normalize_to_block(space, p, &params, f, kappa)?;
            let split = split_block(space, p, &params, &b.values, kappa)?;
            let original = BlockDecomposition {
                terms: vec![(coef, b)],
            };
            let regrouped = dyadic_regroup(space, p, &params, &original)?;
            let ledger: Vec<Value> = regrouped
                .decomposition
                .terms
                .iter()
                .map(|(c, blk)| {
                    let ratio = block_ratio(space, p, &params, &blk.values, blk.kappa)?;
                    Ok(ledger_entry(*c, blk.kappa, ratio, 1.0))
                })
                .collect::<Result<_>>()?;
            json!({
                "kappa": kappa,
                "coefficient": coef,
                "split": {
                    "kappa_large": split.large.kappa,
                    "kappa_small": split.small.kappa,
                    "ratio_large": split.ratio_large,
                    "ratio_small": split.ratio_small,
                    "achieved_a": split.achieved_a,
                    "trivial": split.trivial,
                },
                "regrouped": {
                    "blocks": ledger,
                    "inflation": regrouped.inflation,
                    "max_split_a": regrouped.max_split_a,
                    "reconstruction_exact": regrouped.decomposition.reconstruct(space.n()) == original.reconstruct(space.n()),
                },
            })
        }
    })
}

fn ledger_entry(coefficient: f64, kappa: f64, ratio: f64, bound: f64) -> Value {
    json!({
        "coefficient": coefficient,
        "kappa": kappa,
        "ratio": ratio,
        "certified": ratio <= bound * (1.0 + grandnorm_core::predual::CERT_TOL),
    })
}

pub fn predual(kind: PredualKind, inputs: &InputArgs, args: &PredualArgs) -> Result<Report> {
    let space = inputs::space(&inputs.space)?;
    let p = inputs::exponent(&inputs.exponent, &space)?;
    let f = inputs::function(&inputs.function, &space)?;
    let block = args
        .block
        .as_deref()
        .map(|g| inputs::function(g, &space))
        .transpose()?;
    let name = match kind {
        PredualKind::ScriptL => "scriptL",
        PredualKind::Hnorm => "hnorm",
        PredualKind::Pair => "pair",
        PredualKind::Split => "split",
    };
    let result = match &args.exhaustion {
        None => predual_on(kind, &space, &p, &f, block.as_ref(), args)?,
        Some(levels) => {
            let levels: Vec<i32> = inputs::range(levels)?.collect();
            let sets = exhaustion(&space, &levels)?;
            let per_level = levels
                .iter()
                .zip(&sets)
                .map(|(&j, idx)| {
                    let sub = space.restrict(idx)?;
                    let pick = |v: &[f64]| idx.iter().map(|&i| v[i]).collect::<Vec<f64>>();
                    let p = Exponent::new(pick(p.values()))?;
                    let f = Field::new(pick(f.values()))?;
                    let g = block
                        .as_ref()
                        .map(|g| Field::new(pick(g.values())))
                        .transpose()?;
                    let value = predual_on(kind, &sub, &p, &f, g.as_ref(), args)?;
                    Ok(json!({ "level": j, "n": sub.n(), "mu": sub.mu_x(), "result": value }))
                })
                .collect::<Result<Vec<_>>>()?;
            json!({ "levels": per_level })
        }
    };
    let config = merge(
        input_config(inputs),
        json!({
            "theta": args.theta,
            "a": args.a,
            "grid": args.grid,
            "kappa": args.kappa,
            "block": args.block,
            "exhaustion": args.exhaustion,
        }),
    );
    Ok(Report {
        command: format!("predual {name}"),
        config,
        result,
    })
}

pub fn generate(
    space: &str,
    exponent: Option<&str>,
    lambda: Option<&str>,
    function: Option<&str>,
) -> Result<String> {
    let Some(s) = space_from_spec(space)? else {
        bail!("{space:?} is not a space generator");
    };
    let mut text = space_to_text(&s);
    for (section, spec) in [
        ("exponent", exponent),
        ("lambda", lambda),
        ("function", function),
    ] {
        if let Some(spec) = spec {
            let Some(values) = values_from_spec(spec, &s)? else {
                bail!("{spec:?} is not a value generator");
            };
            text.push_str(&values_to_text(section, &values));
        }
    }
    Ok(text)
}
