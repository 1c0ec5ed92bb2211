//! Modulars, Luxemburg norms and the Hölder pairing of `L^{p(.)}`.
//!
//! Norms are computed in the log domain. Writing `t = e^s` and
//! `a_i = ln w_i + q_i ln|f_i|`, the modular of `f / t` is
//! `F(s) = sum_i exp(a_i - q_i s)`, strictly decreasing in `s`, and
//! `ln ||f|| = s*` with `ln F(s*) = 0`. The root is bracketed by the
//! norm-modular inequalities and located by bisection, so a relative tolerance
//! on the norm is an absolute tolerance on `s`.

use crate::error::{check_len, Error, Result};
use crate::exponent::Exponent;
use crate::space::QuasiMetricSpace;

/// Default tolerance for Luxemburg norms.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_BISECTIONS: usize = 200;

/// Samples `f(x_i)` of a real function, one per point.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    values: Vec<f64>,
}

impl Field {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidField(format!(
                "value {i} = {v} is not finite"
            )));
        }
        Ok(Self { values })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
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

    /// `max_i |f_i|`, 0 for the empty field.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, alpha: f64) -> Field {
        Field {
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    pub fn map(&self, g: impl Fn(f64) -> f64) -> Result<Field> {
        Field::new(self.values.iter().map(|&v| g(v)).collect())
    }
}

/// `S_p(f) = sum_i w_i |f_i|^{p_i}`.
pub fn modular(space: &QuasiMetricSpace, p: &Exponent, f: &Field) -> Result<f64> {
    check_len(space.n(), p.len())?;
    check_len(space.n(), f.len())?;
    Ok(modular_raw(space.ln_weights(), p.values(), f.values()))
}

pub(crate) fn modular_raw(ln_w: &[f64], q: &[f64], f: &[f64]) -> f64 {
    let mut sum = 0.0;
    for i in 0..f.len() {
        if f[i] != 0.0 {
            sum += (ln_w[i] + q[i] * f[i].abs().ln()).exp();
        }
    }
    sum
}

/// Luxemburg norm `inf { t > 0 : S_p(f / t) <= 1 }` to relative tolerance `tol`.
///
/// When `p` is constant the closed form `(sum w |f|^p)^{1/p}` is used.
pub fn luxemburg_norm(space: &QuasiMetricSpace, p: &Exponent, f: &Field, tol: f64) -> Result<f64> {
    check_len(space.n(), p.len())?;
    check_len(space.n(), f.len())?;
    check_tol(tol)?;
    let terms = log_terms(space.ln_weights(), p.values(), f.values(), 0..space.n());
    Ok(ln_norm(&terms, tol)?.exp())
}

/// Luxemburg norm located by bisection even when `p` is constant.
pub fn luxemburg_norm_bisection(
    space: &QuasiMetricSpace,
    p: &Exponent,
    f: &Field,
    tol: f64,
) -> Result<f64> {
    check_len(space.n(), p.len())?;
    check_len(space.n(), f.len())?;
    check_tol(tol)?;
    let terms = log_terms(space.ln_weights(), p.values(), f.values(), 0..space.n());
    Ok(ln_norm_bisect(&terms, tol)?.exp())
}

/// `sum_i w_i f_i g_i`.
pub fn pairing(space: &QuasiMetricSpace, f: &Field, g: &Field) -> Result<f64> {
    check_len(space.n(), f.len())?;
    check_len(space.n(), g.len())?;
    Ok(pairing_raw(space.weights(), f.values(), g.values()))
}

pub(crate) fn pairing_raw(w: &[f64], f: &[f64], g: &[f64]) -> f64 {
    w.iter().zip(f).zip(g).map(|((w, f), g)| w * f * g).sum()
}

/// Constant `1 + 1/p_- - 1/p_+` of the Hölder inequality
/// `|<f, g>| <= C ||f||_{p} ||g||_{p'}`.
pub fn holder_constant(p: &Exponent) -> f64 {
    1.0 + (1.0 / p.min() - 1.0 / p.max())
}

/// Constant `1 + mu(X)` of the embedding `||f||_p <= C ||f||_q` for `p <= q`.
pub fn embedding_constant(space: &QuasiMetricSpace) -> f64 {
    1.0 + space.mu_x()
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

/// Pairs `(ln w_i + q_i ln|f_i|, q_i)` over the nonzero samples in `indices`.
pub(crate) fn log_terms(
    ln_w: &[f64],
    q: &[f64],
    f: &[f64],
    indices: impl IntoIterator<Item = usize>,
) -> Vec<(f64, f64)> {
    indices
        .into_iter()
        .filter(|&i| f[i] != 0.0)
        .map(|i| (ln_w[i] + q[i] * f[i].abs().ln(), q[i]))
        .collect()
}

/// `ln sum_i exp(a_i - q_i s)`.
pub(crate) fn ln_modular_at(terms: &[(f64, f64)], s: f64) -> f64 {
    let m = terms
        .iter()
        .map(|&(a, q)| a - q * s)
        .fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms
        .iter()
        .map(|&(a, q)| (a - q * s - m).exp())
        .sum::<f64>()
        .ln()
}

/// Log of the Luxemburg norm; `-inf` when there are no terms.
pub(crate) fn ln_norm(terms: &[(f64, f64)], tol: f64) -> Result<f64> {
    match terms.first() {
        None => Ok(f64::NEG_INFINITY),
        Some(&(_, q0)) if terms.iter().all(|&(_, q)| q == q0) => Ok(ln_modular_at(terms, 0.0) / q0),
        Some(_) => {
            let (lo, hi) = bracket(terms);
            ln_norm_newton(terms, lo, hi, tol)
        }
    }
}

/// Root bracket from the norm-modular inequalities.
fn bracket(terms: &[(f64, f64)]) -> (f64, f64) {
    let (q_lo, q_hi) = q_range(terms);
    let g0 = ln_modular_at(terms, 0.0);
    let (x, y) = (g0 / q_lo, g0 / q_hi);
    (x.min(y), x.max(y))
}

fn q_range(terms: &[(f64, f64)]) -> (f64, f64) {
    terms
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, q)| {
            (lo.min(q), hi.max(q))
        })
}

/// `ln S(s)` and `-d/ds ln S(s)`, the latter an average of the exponents.
fn ln_modular_slope(terms: &[(f64, f64)], s: f64) -> (f64, f64) {
    let m = terms
        .iter()
        .map(|&(a, q)| a - q * s)
        .fold(f64::NEG_INFINITY, f64::max);
    let (sum, moment) = terms.iter().fold((0.0, 0.0), |(sum, moment), &(a, q)| {
        let e = (a - q * s - m).exp();
        (sum + e, moment + q * e)
    });
    (m + sum.ln(), moment / sum)
}

/// Newton iteration for the log-norm inside `[lo, hi]`.
///
/// `ln S` is convex and decreasing, so Newton steps from the left end stay
/// left of the root and increase monotonically. A step `d` bounds the
/// remaining distance to the root by `d q_+ / q_-`, which gives the stopping
/// rule. Falls back to bisection if rounding pushes an iterate past `hi`.
pub(crate) fn ln_norm_newton(terms: &[(f64, f64)], lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if terms.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    let (lo, hi) = widen(terms, lo, hi);
    let (q_lo, q_hi) = q_range(terms);
    let ratio = q_hi / q_lo;
    let mut x = lo;
    for _ in 0..MAX_BISECTIONS {
        let (g, slope) = ln_modular_slope(terms, x);
        if g <= 0.0 {
            return Ok(x);
        }
        let step = g / slope;
        let next = x + step;
        if next > hi {
            return ln_norm_in(terms, x, hi, tol);
        }
        if step * ratio <= tol || next <= x {
            return Ok(next);
        }
        x = next;
    }
    ln_norm_in(terms, x, hi, tol)
}

fn widen(terms: &[(f64, f64)], mut lo: f64, mut hi: f64) -> (f64, f64) {
    let mut step = 1e-12 * (1.0 + lo.abs());
    while ln_modular_at(terms, lo) < 0.0 {
        lo -= step;
        step *= 2.0;
    }
    let mut step = 1e-12 * (1.0 + hi.abs());
    while ln_modular_at(terms, hi) > 0.0 {
        hi += step;
        step *= 2.0;
    }
    (lo, hi)
}

pub(crate) fn ln_norm_bisect(terms: &[(f64, f64)], tol: f64) -> Result<f64> {
    if terms.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    let (lo, hi) = bracket(terms);
    ln_norm_in(terms, lo, hi, tol)
}

/// Bisection for the log-norm starting from a bracket `[lo, hi]` that is
/// widened if rounding left the root outside.
pub(crate) fn ln_norm_in(terms: &[(f64, f64)], lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if terms.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    let (mut lo, mut hi) = widen(terms, lo, hi);
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if ln_modular_at(terms, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= tol {
        Ok(0.5 * (lo + hi))
    } else {
        Err(Error::NoConvergence {
            iterations: MAX_BISECTIONS,
            width: hi - lo,
        })
    }
}
