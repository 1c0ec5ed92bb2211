//! Variable exponents and their regularity diagnostics.

use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::space::QuasiMetricSpace;

/// A variable exponent `p(.)` with `1 < p_- <= p_+ < inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct Exponent {
    values: Vec<f64>,
    min: f64,
    max: f64,
}

impl Exponent {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySet);
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 1.0)) {
            return Err(Error::InvalidExponent(format!(
                "value {v} is not in (1, inf)"
            )));
        }
        let (min, max) = min_max(&values);
        Ok(Self { values, min, max })
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `p_-`
    pub fn min(&self) -> f64 {
        self.min
    }

    /// `p_+`
    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn is_constant(&self) -> bool {
        self.min == self.max
    }

    /// `(p_-(E), p_+(E))` over the point set `indices`.
    pub fn bounds(&self, indices: &[usize]) -> Result<(f64, f64)> {
        if indices.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &i in indices {
            let v = *self
                .values
                .get(i)
                .ok_or_else(|| Error::InvalidParameter(format!("index {i} out of range")))?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok((lo, hi))
    }

    /// Pointwise `p / (p - 1)`.
    pub fn conjugate(&self) -> Exponent {
        let values: Vec<f64> = self.values.iter().map(|&p| conjugate_value(p)).collect();
        let (min, max) = min_max(&values);
        Exponent { values, min, max }
    }

    /// Pointwise `p - c`, for `0 < c < p_- - 1`.
    pub fn shift(&self, c: f64) -> Result<Exponent> {
        if !(c > 0.0 && c < self.min - 1.0) {
            return Err(Error::InvalidParameter(format!(
                "shift {c} outside (0, p_- - 1) = (0, {})",
                self.min - 1.0
            )));
        }
        Ok(self.shift_unchecked(c))
    }

    /// Pointwise `p - c` without the range check; the caller guarantees
    /// `p_- - c > 1`.
    pub(crate) fn shift_unchecked(&self, c: f64) -> Exponent {
        if c == 0.0 {
            return self.clone();
        }
        let values: Vec<f64> = self.values.iter().map(|&p| p - c).collect();
        let (min, max) = min_max(&values);
        Exponent { values, min, max }
    }

    /// Pointwise reciprocal `1 / p`, as raw values (not an exponent).
    pub fn reciprocal_values(&self) -> Vec<f64> {
        self.values.iter().map(|p| 1.0 / p).collect()
    }
}

pub(crate) fn conjugate_value(p: f64) -> f64 {
    p / (p - 1.0)
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// A Morrey exponent `lambda(.)` with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MorreyExponent {
    values: Vec<f64>,
}

impl MorreyExponent {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySet);
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && **v <= 1.0)) {
            return Err(Error::InvalidExponent(format!(
                "Morrey exponent value {v} is not in [0, 1]"
            )));
        }
        Ok(Self { values })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
        }
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

/// Smallest `a_LH >= 0` with `|r(x) - r(y)| <= a_LH / (-ln mu(B_{x,y}))` for
/// all `x != y` with `mu(B_{x,y}) <= 1/2`, where `B_{x,y} = B(x, d(x, y))`.
///
/// Takes raw values so that it also applies to derived functions such as
/// `1 / (p - c)`. Returns 0 when no pair qualifies.
pub fn log_holder_constant(space: &QuasiMetricSpace, values: &[f64]) -> Result<f64> {
    check_len(space.n(), values.len())?;
    let w = space.weights();
    let mut best = 0.0f64;
    for x in 0..space.n() {
        let balls = space.nested_balls(x);
        let mut inner = 0.0f64;
        for k in 0..balls.len() {
            let shell = balls.shell(k);
            // B(x, d(x, y)) for y in this shell is the union of earlier shells.
            if k > 0 && inner <= 0.5 {
                let gap = shell
                    .iter()
                    .map(|&y| (values[x] - values[y]).abs())
                    .fold(0.0, f64::max);
                best = best.max(gap * -inner.ln());
            }
            inner += shell.iter().map(|&y| w[y]).sum::<f64>();
        }
    }
    Ok(best)
}

/// Ball-oscillation bounds of a function `r(.)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DieningSup {
    /// `max_B mu(B)^(r_-(B) - r_+(B))`
    pub oscillation: f64,
    /// `max_B max_{x,y in B} mu(B)^|r(x) - r(y)|`
    pub pairwise: f64,
}

/// Suprema over all balls of `mu(B)^(r_-(B) - r_+(B))` and of
/// `mu(B)^|r(x) - r(y)|` for `x, y` in `B`.
pub fn diening_sup(space: &QuasiMetricSpace, values: &[f64]) -> Result<DieningSup> {
    check_len(space.n(), values.len())?;
    let w = space.weights();
    let mut oscillation = 1.0f64;
    let mut pairwise = 1.0f64;
    for x in 0..space.n() {
        let balls = space.nested_balls(x);
        let (mut mu, mut lo, mut hi) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..balls.len() {
            for &y in balls.shell(k) {
                mu += w[y];
                lo = lo.min(values[y]);
                hi = hi.max(values[y]);
            }
            let ln_mu: f64 = mu.ln();
            let osc = hi - lo;
            oscillation = oscillation.max((-osc * ln_mu).exp());
            // |r(x) - r(y)| ranges over [0, osc]; x = y gives mu^0 = 1.
            pairwise = pairwise.max((osc * ln_mu).exp());
        }
    }
    Ok(DieningSup {
        oscillation,
        pairwise,
    })
}
