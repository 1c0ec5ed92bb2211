//! Plain-text input formats and symbolic generators.
//!
//! A space file has a `[meta]` section with `key = value` lines (`n`, optional
//! `muX` and `metric`), a `[weights]` section with `n` values, and either a
//! `[dist]` section with `n` rows of `n` values or a `[coords]` section with
//! one row of coordinates per point. Value files carry one of the sections
//! `[exponent]`, `[lambda]` or `[function]`. Values may be separated by
//! whitespace or commas; `#` starts a comment.
//!
//! Generators stand in for files on the command line:
//!
//! | kind     | syntax                 | meaning                                  |
//! |----------|------------------------|------------------------------------------|
//! | space    | `dyadic:K`             | `2^K` uniform cells of `[0, 1]`           |
//! | space    | `graded:K`             | `2^K` cells refined toward 0             |
//! | space    | `snowflake:K,alpha`    | `dyadic:K` with `d = \|x - y\|^alpha`      |
//! | space    | `halfline:K,L`         | cells of width `2^-K` on `[0, 2^L]`       |
//! | values   | `const:v`              | `v`                                      |
//! | values   | `affine:a,b`           | `a + b x`                                |
//! | values   | `jump:x0,v1,v2`        | `v1` for `x < x0`, else `v2`             |
//! | values   | `power:alpha`          | `x^-alpha`                               |
//!
//! Value generators read the first coordinate of each point; the points of
//! generated spaces are cell midpoints, so `power` never sees 0. A point at
//! or left of 0 is mapped to the smallest positive coordinate.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::space::{Metric, QuasiMetricSpace};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Lines of each `[section]`, with 1-based line numbers, comments stripped.
fn sections(text: &str) -> Result<BTreeMap<String, Vec<(usize, String)>>> {
    let mut out: BTreeMap<String, Vec<(usize, String)>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim().to_ascii_lowercase();
            if out.contains_key(&name) {
                return Err(parse_err(i + 1, format!("duplicate section [{name}]")));
            }
            out.insert(name.clone(), Vec::new());
            current = Some(name);
            continue;
        }
        match &current {
            Some(name) => out
                .get_mut(name)
                .expect("section exists")
                .push((i + 1, line.to_string())),
            None => return Err(parse_err(i + 1, "content before the first section")),
        }
    }
    Ok(out)
}

fn numbers(line_no: usize, line: &str) -> Result<Vec<f64>> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| parse_err(line_no, format!("not a number: {t:?}")))
        })
        .collect()
}

fn flat_numbers(lines: &[(usize, String)]) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (no, line) in lines {
        out.extend(numbers(*no, line)?);
    }
    Ok(out)
}

/// Parses `metric = euclidean | snowflake:alpha`.
pub fn parse_metric(s: &str) -> Result<Metric> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("euclidean") {
        return Ok(Metric::Euclidean);
    }
    if let Some(alpha) = s.strip_prefix("snowflake:") {
        let alpha: f64 = alpha
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSpace(format!("bad snowflake exponent {alpha:?}")))?;
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidSpace(format!(
                "snowflake exponent must be positive, got {alpha}"
            )));
        }
        return Ok(Metric::Snowflake(alpha));
    }
    Err(Error::InvalidSpace(format!("unknown metric {s:?}")))
}

/// Parses a space file.
pub fn parse_space(text: &str) -> Result<QuasiMetricSpace> {
    let secs = sections(text)?;
    let meta_lines = secs
        .get("meta")
        .ok_or_else(|| parse_err(0, "missing [meta] section"))?;
    let mut meta = BTreeMap::new();
    for (no, line) in meta_lines {
        for item in line.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| parse_err(*no, format!("expected key = value, got {item:?}")))?;
            meta.insert(k.trim().to_ascii_lowercase(), (*no, v.trim().to_string()));
        }
    }
    let (n_line, n_text) = meta
        .get("n")
        .ok_or_else(|| parse_err(0, "[meta] lacks n"))?;
    let n: usize = n_text
        .parse()
        .map_err(|_| parse_err(*n_line, format!("bad point count {n_text:?}")))?;
    if n == 0 {
        return Err(parse_err(*n_line, "point count must be positive"));
    }
    let weights = flat_numbers(
        secs.get("weights")
            .ok_or_else(|| parse_err(0, "missing [weights] section"))?,
    )?;
    if weights.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: weights.len(),
        });
    }
    let space = match (secs.get("dist"), secs.get("coords")) {
        (Some(rows), None) => {
            if rows.len() != n {
                return Err(parse_err(
                    rows.first().map_or(0, |r| r.0),
                    format!("[dist] needs {n} rows, got {}", rows.len()),
                ));
            }
            let mut dist = Vec::with_capacity(n * n);
            for (no, line) in rows {
                let row = numbers(*no, line)?;
                if row.len() != n {
                    return Err(parse_err(
                        *no,
                        format!("row has {} entries, expected {n}", row.len()),
                    ));
                }
                dist.extend(row);
            }
            QuasiMetricSpace::from_matrix(dist, weights)?
        }
        (None, Some(rows)) => {
            if rows.len() != n {
                return Err(parse_err(
                    rows.first().map_or(0, |r| r.0),
                    format!("[coords] needs {n} rows, got {}", rows.len()),
                ));
            }
            let mut coords = Vec::new();
            let mut dim = None;
            for (no, line) in rows {
                let row = numbers(*no, line)?;
                match dim {
                    None => dim = Some(row.len()),
                    Some(d) if d != row.len() => {
                        return Err(parse_err(
                            *no,
                            format!("row has {} coordinates, expected {d}", row.len()),
                        ))
                    }
                    _ => {}
                }
                coords.extend(row);
            }
            let metric = match meta.get("metric") {
                Some((_, m)) => parse_metric(m)?,
                None => Metric::Euclidean,
            };
            QuasiMetricSpace::from_coords(coords, dim.unwrap_or(0), weights, metric)?
        }
        (Some(_), Some(_)) => return Err(parse_err(0, "give either [dist] or [coords], not both")),
        (None, None) => return Err(parse_err(0, "missing [dist] or [coords] section")),
    };
    if let Some((no, mu_text)) = meta.get("mux") {
        let mu: f64 = mu_text
            .parse()
            .map_err(|_| parse_err(*no, format!("bad muX {mu_text:?}")))?;
        if (mu - space.mu_x()).abs() > 1e-9 * mu.abs().max(1.0) {
            return Err(parse_err(
                *no,
                format!("muX = {mu} but weights sum to {}", space.mu_x()),
            ));
        }
    }
    Ok(space)
}

/// Serializes a space in the file format accepted by [`parse_space`].
pub fn space_to_text(space: &QuasiMetricSpace) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[meta]\nn = {}\nmuX = {:e}", space.n(), space.mu_x());
    if let Some(metric) = space.metric() {
        let m = match metric {
            Metric::Euclidean => "euclidean".to_string(),
            Metric::Snowflake(alpha) => format!("snowflake:{alpha:e}"),
        };
        let _ = writeln!(out, "metric = {m}");
    }
    out.push_str("[weights]\n");
    for w in space.weights() {
        let _ = writeln!(out, "{w:e}");
    }
    if space.metric().is_some() {
        out.push_str("[coords]\n");
        for row in space.coords().chunks(space.dim()) {
            let row: Vec<String> = row.iter().map(|x| format!("{x:e}")).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    } else {
        out.push_str("[dist]\n");
        for i in 0..space.n() {
            let row: Vec<String> = (0..space.n())
                .map(|j| format!("{:e}", space.dist(i, j)))
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    out
}

/// Values of the named section (`exponent`, `lambda` or `function`).
pub fn parse_values(text: &str, section: &str) -> Result<Vec<f64>> {
    let secs = sections(text)?;
    let lines = secs
        .get(section)
        .ok_or_else(|| parse_err(0, format!("missing [{section}] section")))?;
    flat_numbers(lines)
}

/// Serializes values under a section header.
pub fn values_to_text(section: &str, values: &[f64]) -> String {
    let mut out = format!("[{section}]\n");
    for v in values {
        let _ = writeln!(out, "{v:e}");
    }
    out
}

fn args(spec: &str, rest: &str, count: usize) -> Result<Vec<f64>> {
    let vals: Vec<f64> = rest
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number {t:?} in {spec:?}")))
        })
        .collect::<Result<_>>()?;
    if vals.len() != count {
        return Err(Error::InvalidParameter(format!(
            "{spec:?} needs {count} argument(s)"
        )));
    }
    Ok(vals)
}

fn level(spec: &str, v: f64) -> Result<u32> {
    if (0.0..=30.0).contains(&v) && v.fract() == 0.0 {
        Ok(v as u32)
    } else {
        Err(Error::InvalidParameter(format!(
            "bad level {v} in {spec:?}"
        )))
    }
}

/// Builds a space from a generator spec; `None` if `spec` is not one.
pub fn space_from_spec(spec: &str) -> Result<Option<QuasiMetricSpace>> {
    let Some((kind, rest)) = spec.split_once(':') else {
        return Ok(None);
    };
    let space = match kind {
        "dyadic" => QuasiMetricSpace::uniform_dyadic(level(spec, args(spec, rest, 1)?[0])?)?,
        "graded" => QuasiMetricSpace::graded_dyadic(level(spec, args(spec, rest, 1)?[0])?)?,
        "snowflake" => {
            let a = args(spec, rest, 2)?;
            QuasiMetricSpace::snowflake_dyadic(level(spec, a[0])?, a[1])?
        }
        "halfline" => {
            let a = args(spec, rest, 2)?;
            QuasiMetricSpace::half_line(level(spec, a[0])?, level(spec, a[1])?)?
        }
        _ => return Ok(None),
    };
    Ok(Some(space))
}

/// Evaluates a value generator on the space's first coordinate; `None` if
/// `spec` is not a generator.
pub fn values_from_spec(spec: &str, space: &QuasiMetricSpace) -> Result<Option<Vec<f64>>> {
    let Some((kind, rest)) = spec.split_once(':') else {
        return Ok(None);
    };
    if !matches!(kind, "const" | "affine" | "jump" | "power") {
        return Ok(None);
    }
    if kind == "const" {
        let v = args(spec, rest, 1)?[0];
        return Ok(Some(vec![v; space.n()]));
    }
    let x = space.first_coords().ok_or_else(|| {
        Error::InvalidParameter(format!("{spec:?} needs a space with coordinates"))
    })?;
    let values = match kind {
        "affine" => {
            let a = args(spec, rest, 2)?;
            x.iter().map(|t| a[0] + a[1] * t).collect()
        }
        "jump" => {
            let a = args(spec, rest, 3)?;
            x.iter()
                .map(|&t| if t < a[0] { a[1] } else { a[2] })
                .collect()
        }
        _ => {
            let alpha = args(spec, rest, 1)?[0];
            let floor = x
                .iter()
                .copied()
                .filter(|&t| t > 0.0)
                .fold(f64::INFINITY, f64::min);
            if !floor.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{spec:?} needs a positive coordinate"
                )));
            }
            x.iter()
                .map(|&t| (if t > 0.0 { t } else { floor }).powf(-alpha))
                .collect()
        }
    };
    Ok(Some(values))
}
