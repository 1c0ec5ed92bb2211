//! Variable Morrey norms and grand variable-exponent Morrey norms.
//!
//! The Morrey norm is a supremum over all balls. From each center the balls
//! form a nested chain, and the norm-modular inequalities give cheap lower and
//! upper bounds for every ball from running modular sums. The evaluator keeps
//! the best lower bound and computes exact Luxemburg norms only for balls whose
//! upper bound beats it, which makes the supremum exact while touching few
//! balls. All shifts of a grand norm share one pass over the ball chains.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::exponent::{Exponent, MorreyExponent};
use crate::lebesgue::{check_tol, ln_norm, ln_norm_newton, log_terms, Field};
use crate::space::QuasiMetricSpace;

const BOUND_SLACK: f64 = 1e-9;

/// Shift grid of a grand norm.
///
/// The grid is the image of `count` equispaced points in `[-U, U]` under
/// `c = (p_- - 1) / (1 + e^{-u})`, with `U` chosen so that the extreme shifts
/// are `offset (p_- - 1)` and `(1 - offset)(p_- - 1)`. Points accumulate at
/// both ends of `(0, p_- - 1)`, and the grid of `2 count - 1` points contains
/// this one bitwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrandParams {
    pub theta: f64,
    pub count: usize,
    pub offset: f64,
}

impl GrandParams {
    pub const DEFAULT_COUNT: usize = 64;
    pub const DEFAULT_OFFSET: f64 = 1e-3;

    pub fn new(theta: f64, count: usize, offset: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "theta must be positive, got {theta}"
            )));
        }
        if count == 0 {
            return Err(Error::InvalidParameter(
                "shift grid needs at least one point".into(),
            ));
        }
        if !(offset > 0.0 && offset < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "grid offset {offset} outside (0, 1/2)"
            )));
        }
        Ok(Self {
            theta,
            count,
            offset,
        })
    }

    pub fn with_theta(theta: f64) -> Result<Self> {
        Self::new(theta, Self::DEFAULT_COUNT, Self::DEFAULT_OFFSET)
    }

    /// The grid with every gap halved.
    pub fn refined(&self) -> Self {
        Self {
            count: 2 * self.count - 1,
            ..*self
        }
    }

    /// Ascending shifts in `(0, p_minus - 1)`.
    pub fn grid(&self, p_minus: f64) -> Result<Vec<f64>> {
        let span = p_minus - 1.0;
        if !(span > 0.0) {
            return Err(Error::InvalidExponent(format!(
                "p_- = {p_minus} leaves no room for shifts"
            )));
        }
        if self.count == 1 {
            return Ok(vec![0.5 * span]);
        }
        let u_max = ((1.0 - self.offset) / self.offset).ln();
        let two_u = 2.0 * u_max;
        let denom = (self.count - 1) as f64;
        let grid: Vec<f64> = (0..self.count)
            .map(|k| {
                let u = -u_max + two_u * k as f64 / denom;
                span / (1.0 + (-u).exp())
            })
            .collect();
        if let Some(c) = grid
            .iter()
            .find(|&&c| !(c > 0.0 && c < span && p_minus - c > 1.0))
        {
            return Err(Error::InvalidParameter(format!(
                "grid shift {c} outside (0, {span})"
            )));
        }
        Ok(grid)
    }
}

/// Temper factor `c^{theta / (p_- - c)}`.
pub fn temper(c: f64, theta: f64, p_minus: f64) -> f64 {
    (theta / (p_minus - c) * c.ln()).exp()
}

/// One point of a grand-norm profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub c: f64,
    /// `c^{theta / (p_- - c)}`
    pub weight: f64,
    /// Morrey norm with exponent `p - c`.
    pub norm: f64,
    /// `weight * norm`
    pub value: f64,
}

/// A grand norm together with its full shift profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrandReport {
    pub theta: f64,
    pub p_minus: f64,
    pub norm: f64,
    pub argmax_c: f64,
    pub profile: Vec<ProfilePoint>,
}

/// How a ball's normalizing power is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Prefactor {
    /// `mu(B)^{-lambda(x) / (p(x) - c)}` with `x` the center.
    Center,
    /// `mu(B)^{-lambda_-(B) / (p_-(B) - c)}`.
    BallInfimum,
}

/// Variable Morrey norm
/// `sup_{x, r} mu(B(x, r))^{-lambda(x)/p(x)} ||f chi_{B(x, r)}||_{p}`,
/// the radius running up to a ball that covers the whole space.
pub fn morrey_norm(
    space: &QuasiMetricSpace,
    p: &Exponent,
    lambda: &MorreyExponent,
    f: &Field,
    tol: f64,
) -> Result<f64> {
    Ok(morrey_profile(space, p, lambda, f, &[0.0], Prefactor::Center, tol)?[0])
}

/// Morrey norms with exponents `p - c` for each shift `c` in `shifts`.
pub fn shifted_morrey_norms(
    space: &QuasiMetricSpace,
    p: &Exponent,
    lambda: &MorreyExponent,
    f: &Field,
    shifts: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    check_shifts(p, shifts)?;
    morrey_profile(space, p, lambda, f, shifts, Prefactor::Center, tol)
}

/// Grand variable Morrey norm
/// `max_c c^{theta/(p_- - c)} ||f||_{L^{p - c, lambda}}` over the shift grid.
pub fn grand_morrey_norm(
    space: &QuasiMetricSpace,
    p: &Exponent,
    lambda: &MorreyExponent,
    params: &GrandParams,
    f: &Field,
    tol: f64,
) -> Result<GrandReport> {
    grand(space, p, lambda, params, f, Prefactor::Center, tol)
}

/// Grand variable Lebesgue norm, i.e. the grand Morrey norm with `lambda = 0`.
pub fn grand_lebesgue_norm(
    space: &QuasiMetricSpace,
    p: &Exponent,
    params: &GrandParams,
    f: &Field,
    tol: f64,
) -> Result<GrandReport> {
    grand(
        space,
        p,
        &MorreyExponent::zero(space.n()),
        params,
        f,
        Prefactor::Center,
        tol,
    )
}

/// Variant of the grand Morrey norm whose ball prefactor uses the ball-wise
/// infima `mu(B)^{-lambda_-(B) / (p_-(B) - c)}`.
pub fn equivalent_grand_norm(
    space: &QuasiMetricSpace,
    p: &Exponent,
    lambda: &MorreyExponent,
    params: &GrandParams,
    f: &Field,
    tol: f64,
) -> Result<GrandReport> {
    grand(space, p, lambda, params, f, Prefactor::BallInfimum, tol)
}

fn grand(
    space: &QuasiMetricSpace,
    p: &Exponent,
    lambda: &MorreyExponent,
    params: &GrandParams,
    f: &Field,
    mode: Prefactor,
    tol: f64,
) -> Result<GrandReport> {
    let grid = params.grid(p.min())?;
    let norms = morrey_profile(space, p, lambda, f, &grid, mode, tol)?;
    let profile: Vec<ProfilePoint> = grid
        .iter()
        .zip(&norms)
        .map(|(&c, &norm)| {
            let weight = temper(c, params.theta, p.min());
            ProfilePoint {
                c,
                weight,
                norm,
                value: weight * norm,
            }
        })
        .collect();
    let (norm, argmax_c) = profile_max(&profile);
    Ok(GrandReport {
        theta: params.theta,
        p_minus: p.min(),
        norm,
        argmax_c,
        profile,
    })
}

pub(crate) fn profile_max(profile: &[ProfilePoint]) -> (f64, f64) {
    profile.iter().fold(
        (0.0, profile.first().map_or(0.0, |pt| pt.c)),
        |(best, at), pt| {
            if pt.value > best {
                (pt.value, pt.c)
            } else {
                (best, at)
            }
        },
    )
}

fn check_shifts(p: &Exponent, shifts: &[f64]) -> Result<()> {
    match shifts.iter().find(|&&c| !(c > 0.0 && p.min() - c > 1.0)) {
        Some(c) => Err(Error::InvalidParameter(format!(
            "shift {c} outside (0, {})",
            p.min() - 1.0
        ))),
        None => Ok(()),
    }
}

/// The three norms of `L^{p,lambda} -> L^{p,lambda,theta} -> L^{p-c,lambda}`
/// with the constants of both embeddings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingChain {
    pub c: f64,
    /// `||f||_{L^{p, lambda}}`
    pub morrey: f64,
    /// `||f||_{L^{p, lambda, theta}}` over the shift grid.
    pub grand: f64,
    /// `||f||_{L^{p - c, lambda}}`
    pub shifted: f64,
    /// `c^{-theta/(p_- - c)}`: `shifted <= c1 * grand`.
    pub c1: f64,
    /// `max_c c^{theta/(p_- - c)} (1 + mu(X)) max_x w_x^{lambda(x)(1/p(x) - 1/(p(x) - c))}`:
    /// `grand <= c2 * morrey`.
    pub c2: f64,
    pub shifted_over_grand: f64,
    pub grand_over_morrey: f64,
    pub left_holds: bool,
    pub right_holds: bool,
}

/// Evaluates both embeddings of the chain at the shift `c` (default: the
/// middle grid point).
pub fn embedding_chain_report(
    space: &QuasiMetricSpace,
    p: &Exponent,
    lambda: &MorreyExponent,
    params: &GrandParams,
    f: &Field,
    c: Option<f64>,
    tol: f64,
) -> Result<EmbeddingChain> {
    let grid = params.grid(p.min())?;
    let c = c.unwrap_or(grid[grid.len() / 2]);
    check_shifts(p, &[c])?;
    let morrey = morrey_norm(space, p, lambda, f, tol)?;
    let grand = grand_morrey_norm(space, p, lambda, params, f, tol)?.norm;
    let shifted = shifted_morrey_norms(space, p, lambda, f, &[c], tol)?[0];
    let c1 = 1.0 / temper(c, params.theta, p.min());
    let w = space.weights();
    let c2 = grid
        .iter()
        .map(|&c| {
            let local = (0..space.n())
                .map(|x| {
                    let px = p.values()[x];
                    (lambda.values()[x] * (1.0 / px - 1.0 / (px - c)) * w[x].ln()).exp()
                })
                .fold(1.0f64, f64::max);
            temper(c, params.theta, p.min()) * (1.0 + space.mu_x()) * local
        })
        .fold(0.0f64, f64::max);
    let ratio = |a: f64, b: f64| if b == 0.0 { 0.0 } else { a / b };
    let slack = 1.0 + 1e3 * tol.max(f64::EPSILON);
    Ok(EmbeddingChain {
        c,
        morrey,
        grand,
        shifted,
        c1,
        c2,
        shifted_over_grand: ratio(shifted, grand),
        grand_over_morrey: ratio(grand, morrey),
        left_holds: shifted <= c1 * grand * slack,
        right_holds: grand <= c2 * morrey * slack,
    })
}

/// Morrey norms of `f` with exponents `p - c`, `c` in `shifts` (`c = 0`
/// allowed). Shifts are assumed valid.
pub(crate) fn morrey_profile(
    space: &QuasiMetricSpace,
    p: &Exponent,
    lambda: &MorreyExponent,
    f: &Field,
    shifts: &[f64],
    mode: Prefactor,
    tol: f64,
) -> Result<Vec<f64>> {
    check_len(space.n(), p.len())?;
    check_len(space.n(), lambda.len())?;
    check_len(space.n(), f.len())?;
    check_tol(tol)?;
    if f.is_zero() {
        return Ok(vec![0.0; shifts.len()]);
    }
    let full = shifts
        .par_iter()
        .map(|&c| {
            let q = p.shift_unchecked(c);
            ln_norm(
                &log_terms(space.ln_weights(), q.values(), f.values(), 0..space.n()),
                tol,
            )
        })
        .collect::<Result<Vec<f64>>>()?;
    if lambda.is_zero() {
        // Every prefactor is 1 and the full ball dominates by monotonicity.
        return Ok(full.into_iter().map(f64::exp).collect());
    }
    let anchors = anchors(space, p.values(), f.values(), shifts, &full);
    let eval = BallScan {
        space,
        p: p.values(),
        lambda: lambda.values(),
        f: f.values(),
        shifts,
        anchors,
        mode,
        tol,
    };
    let n = space.n();
    let bounds = (0..n)
        .into_par_iter()
        .map(|x| eval.center_bounds(x))
        .collect::<Vec<_>>();
    let lower = bounds
        .iter()
        .fold(vec![f64::NEG_INFINITY; shifts.len()], |acc, (lo, _)| {
            max_merge(acc, lo.clone())
        });
    let exact = (0..n)
        .into_par_iter()
        .filter(|&x| {
            bounds[x]
                .1
                .iter()
                .zip(&lower)
                .any(|(u, l)| *u >= l - BOUND_SLACK)
        })
        .map(|x| eval.refine(x, &lower))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(lower, max_merge);
    Ok(exact.into_iter().map(f64::exp).collect())
}

const MAX_ANCHORS: usize = 8;
const ANCHOR_SPACING: f64 = 0.5;

/// Per shift, log-norm levels spread over the range of all ball norms: from
/// the smallest singleton norm up to the norm over the whole space.
fn anchors(
    space: &QuasiMetricSpace,
    p: &[f64],
    f: &[f64],
    shifts: &[f64],
    full: &[f64],
) -> Vec<Vec<f64>> {
    let ln_w = space.ln_weights();
    shifts
        .iter()
        .zip(full)
        .map(|(&c, &hi)| {
            let lo = (0..f.len())
                .filter(|&i| f[i] != 0.0)
                .map(|i| f[i].abs().ln() + ln_w[i] / (p[i] - c))
                .fold(f64::INFINITY, f64::min)
                .min(hi);
            let count = (((hi - lo) / ANCHOR_SPACING).ceil() as usize + 1).clamp(2, MAX_ANCHORS);
            (0..count)
                .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
                .collect()
        })
        .collect()
}

fn max_merge(mut acc: Vec<f64>, other: Vec<f64>) -> Vec<f64> {
    for (a, b) in acc.iter_mut().zip(other) {
        *a = a.max(b);
    }
    acc
}

/// Bounds for the root of `ln S` from the anchor sums.
fn bracket(acc: &[LogSum], anchors: &[f64], q_lo: f64, q_hi: f64) -> (f64, f64) {
    // First anchor with a negative log-modular; `ln S` decreases along anchors.
    let i = acc.partition_point(|sum| sum.value() >= 0.0);
    let tangent = |a: usize| anchors[a] + acc[a].value() / acc[a].slope();
    if q_lo == q_hi {
        let r = tangent(i.min(acc.len() - 1));
        return (r, r);
    }
    if i == 0 {
        let g = acc[0].value();
        return (tangent(0), anchors[0] + g / q_hi);
    }
    if i == acc.len() {
        let last = acc.len() - 1;
        let g = acc[last].value();
        return (tangent(last), anchors[last] + g / q_lo);
    }
    let (s1, s2) = (anchors[i - 1], anchors[i]);
    let (g1, g2) = (acc[i - 1].value(), acc[i].value());
    let lower = tangent(i - 1).max(tangent(i));
    let chord = s1 + g1 * (s2 - s1) / (g1 - g2);
    let upper = chord.min(s1 + g1 / q_lo).min(s2 + g2 / q_hi);
    (lower, upper.max(lower))
}

struct BallScan<'a> {
    space: &'a QuasiMetricSpace,
    p: &'a [f64],
    lambda: &'a [f64],
    f: &'a [f64],
    shifts: &'a [f64],
    anchors: Vec<Vec<f64>>,
    mode: Prefactor,
    tol: f64,
}

/// Bounds for one ball and one shift: the log-norm lies in `[lower, upper]`.
struct BallBounds {
    level: usize,
    shift: usize,
    lower: f64,
    upper: f64,
    ln_prefactor: f64,
}

/// Running `ln sum exp(t)` as `max + ln(sum)`, together with the
/// `exp(t)`-weighted sum of the exponents.
#[derive(Clone, Copy)]
struct LogSum {
    max: f64,
    sum: f64,
    moment: f64,
}

impl LogSum {
    const EMPTY: LogSum = LogSum {
        max: f64::NEG_INFINITY,
        sum: 0.0,
        moment: 0.0,
    };

    #[inline]
    fn add(&mut self, t: f64, q: f64) {
        if t > self.max {
            let scale = (self.max - t).exp();
            self.sum = self.sum * scale + 1.0;
            self.moment = self.moment * scale + q;
            self.max = t;
        } else {
            let e = (t - self.max).exp();
            self.sum += e;
            self.moment += q * e;
        }
    }

    fn value(&self) -> f64 {
        self.max + self.sum.ln()
    }

    /// Mean exponent, i.e. `-d/ds ln S`.
    fn slope(&self) -> f64 {
        self.moment / self.sum
    }
}

impl BallScan<'_> {
    /// Walks the ball chain around `x`, calling `visit` with bounds for every
    /// ball carrying mass of `f`.
    ///
    /// `G(s) = ln S(s)` is convex and decreasing with slope between `-q_+`
    /// and `-q_-`. Around the root it is bracketed by anchors `s_1 < s_2`
    /// with `G(s_1) >= 0 > G(s_2)`: tangents at both anchors give lower
    /// bounds, the chord and the extreme slopes give upper bounds.
    fn scan(&self, x: usize, mut visit: impl FnMut(&BallBounds)) -> crate::space::NestedBalls {
        let balls = self.space.nested_balls(x);
        let ln_w = self.space.ln_weights();
        let w = self.space.weights();
        let mut acc: Vec<Vec<LogSum>> = self
            .anchors
            .iter()
            .map(|a| vec![LogSum::EMPTY; a.len()])
            .collect();
        let mut massive = false;
        let (mut mu, mut p_lo, mut p_hi, mut lam_lo) =
            (0.0, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
        for k in 0..balls.len() {
            for &y in balls.shell(k) {
                mu += w[y];
                p_lo = p_lo.min(self.p[y]);
                p_hi = p_hi.max(self.p[y]);
                lam_lo = lam_lo.min(self.lambda[y]);
                if self.f[y] == 0.0 {
                    continue;
                }
                massive = true;
                let lf = self.f[y].abs().ln();
                for (j, &c) in self.shifts.iter().enumerate() {
                    let q = self.p[y] - c;
                    let t0 = ln_w[y] + q * lf;
                    for (sum, &s) in acc[j].iter_mut().zip(&self.anchors[j]) {
                        sum.add(t0 - q * s, q);
                    }
                }
            }
            if !massive {
                continue;
            }
            let ln_mu = mu.ln();
            for (j, &c) in self.shifts.iter().enumerate() {
                let (lower, upper) = bracket(&acc[j], &self.anchors[j], p_lo - c, p_hi - c);
                let ln_prefactor = match self.mode {
                    Prefactor::Center => -self.lambda[x] / (self.p[x] - c) * ln_mu,
                    Prefactor::BallInfimum => -lam_lo / (p_lo - c) * ln_mu,
                };
                visit(&BallBounds {
                    level: k,
                    shift: j,
                    lower,
                    upper,
                    ln_prefactor,
                });
            }
        }
        balls
    }

    /// Best lower bound and largest upper bound over the balls around `x`,
    /// per shift. Upper bounds of balls already within tolerance are left out.
    fn center_bounds(&self, x: usize) -> (Vec<f64>, Vec<f64>) {
        let mut lower = vec![f64::NEG_INFINITY; self.shifts.len()];
        let mut upper = lower.clone();
        self.scan(x, |b| {
            lower[b.shift] = lower[b.shift].max(b.lower + b.ln_prefactor);
            if b.upper - b.lower > self.tol {
                upper[b.shift] = upper[b.shift].max(b.upper + b.ln_prefactor);
            }
        });
        (lower, upper)
    }

    /// Exact log-values of the balls around `x` that may beat `floor`.
    fn refine(&self, x: usize, floor: &[f64]) -> Result<Vec<f64>> {
        let mut candidates: Vec<Vec<(f64, f64, usize, f64)>> = vec![Vec::new(); self.shifts.len()];
        let balls = self.scan(x, |b| {
            let upper = b.upper + b.ln_prefactor;
            // Balls with bounds within tolerance already entered the floor.
            if b.upper - b.lower > self.tol && upper >= floor[b.shift] - BOUND_SLACK {
                candidates[b.shift].push((upper, b.lower, b.level, b.ln_prefactor));
            }
        });
        let ln_w = self.space.ln_weights();
        let mut best = vec![f64::NEG_INFINITY; self.shifts.len()];
        let mut q = vec![0.0; self.p.len()];
        for (j, list) in candidates.iter_mut().enumerate() {
            if list.is_empty() {
                continue;
            }
            list.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.2.cmp(&b.2)));
            let c = self.shifts[j];
            for (qi, pi) in q.iter_mut().zip(self.p) {
                *qi = pi - c;
            }
            for &(upper, lower, level, ln_prefactor) in list.iter() {
                if upper < best[j].max(floor[j]) - BOUND_SLACK {
                    break;
                }
                let terms = log_terms(ln_w, &q, self.f, balls.ball(level).iter().copied());
                let value =
                    ln_norm_newton(&terms, lower, upper - ln_prefactor, self.tol)? + ln_prefactor;
                best[j] = best[j].max(value);
            }
        }
        Ok(best)
    }
}
