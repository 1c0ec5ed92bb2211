//! Loading spaces and value fields from files or generator specs.

use std::ops::RangeInclusive;

use anyhow::{bail, Context, Result};
use grandnorm_core::io::{parse_space, parse_values, space_from_spec, values_from_spec};
use grandnorm_core::{Exponent, Field, MorreyExponent, QuasiMetricSpace};

pub fn space(arg: &str) -> Result<QuasiMetricSpace> {
    if let Some(space) = space_from_spec(arg)? {
        return Ok(space);
    }
    let text = std::fs::read_to_string(arg).with_context(|| format!("reading space file {arg}"))?;
    parse_space(&text).with_context(|| format!("in space file {arg}"))
}

/// Values from a generator, or from the `[section]` of a file.
pub fn values(arg: &str, section: &str, space: &QuasiMetricSpace) -> Result<Vec<f64>> {
    if let Some(values) = values_from_spec(arg, space)? {
        return Ok(values);
    }
    let text =
        std::fs::read_to_string(arg).with_context(|| format!("reading {section} file {arg}"))?;
    let values =
        parse_values(&text, section).with_context(|| format!("in {section} file {arg}"))?;
    if values.len() != space.n() {
        bail!(
            "{section} file {arg} has {} values for {} points",
            values.len(),
            space.n()
        );
    }
    Ok(values)
}

pub fn exponent(arg: &str, space: &QuasiMetricSpace) -> Result<Exponent> {
    Ok(Exponent::new(values(arg, "exponent", space)?)?)
}

pub fn lambda(arg: &str, space: &QuasiMetricSpace) -> Result<MorreyExponent> {
    Ok(MorreyExponent::new(values(arg, "lambda", space)?)?)
}

pub fn function(arg: &str, space: &QuasiMetricSpace) -> Result<Field> {
    Ok(Field::new(values(arg, "function", space)?)?)
}

/// Parses `a..b` (inclusive) or a single integer.
pub fn range(arg: &str) -> Result<RangeInclusive<i32>> {
    let parse = |s: &str| {
        s.trim()
            .parse::<i32>()
            .with_context(|| format!("bad level {s:?} in {arg:?}"))
    };
    let (lo, hi) = match arg.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(arg)?;
            (v, v)
        }
    };
    if lo > hi {
        bail!("empty level range {arg:?}");
    }
    Ok(lo..=hi)
}

/// Shift grid `dyadic:L` or a comma-separated list.
pub enum KappaGrid {
    Dyadic(u32),
    List(Vec<f64>),
}

pub fn kappa_grid(arg: &str) -> Result<KappaGrid> {
    if let Some(levels) = arg.strip_prefix("dyadic:") {
        let levels: u32 = levels
            .trim()
            .parse()
            .with_context(|| format!("bad grid {arg:?}"))?;
        return Ok(KappaGrid::Dyadic(levels));
    }
    let list = arg
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("bad shift {t:?} in grid {arg:?}"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KappaGrid::List(list))
}
