//! The tempered sup-norm over shifted Lebesgue spaces and its block space.
//!
//! For `0 < a < p_- - 1` and real `theta`,
//! `||f||_L = sup_{0 < k <= a} k^{theta/(p_- - k)} ||f||_{p - k}`. A block at
//! shift `k` is a function with `||b||_{(p - k)'} <= k^{theta/(p_- - k)}`,
//! and the block space norm is the infimum of `sum |lambda_j|` over
//! expansions `f = sum lambda_j b_j`. That infimum is bracketed here: single
//! block expansions give upper bounds, pairings against test functions give
//! lower bounds up to the Hölder constant `c_p`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::exponent::Exponent;
use crate::lebesgue::{holder_constant, luxemburg_norm, pairing_raw, Field, DEFAULT_TOL};
use crate::morrey::temper;
use crate::space::QuasiMetricSpace;

/// Relative slack allowed when certifying a block.
pub const CERT_TOL: f64 = 1e-9;

/// Parameters `theta`, `a` and the shift grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScriptLParams {
    pub theta: f64,
    pub a: f64,
    /// Ascending shifts in `(0, a]`, always containing `a`.
    pub kappa_grid: Vec<f64>,
    /// Let [`split_block`] return the unsplit block when the embedding
    /// constant already certifies it at the smaller shift.
    pub trivial_split: bool,
}

impl ScriptLParams {
    pub const DEFAULT_LEVELS: u32 = 20;

    /// Grid `{ 2^-l a : l = 0..=levels }`.
    pub fn dyadic(theta: f64, a: f64, levels: u32) -> Result<Self> {
        let grid = (0..=levels)
            .rev()
            .map(|l| a * 0.5f64.powi(l as i32))
            .collect();
        Self::with_grid(theta, a, grid)
    }

    pub fn with_grid(theta: f64, a: f64, mut kappa_grid: Vec<f64>) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "theta must be finite, got {theta}"
            )));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "a must be positive, got {a}"
            )));
        }
        if let Some(k) = kappa_grid.iter().find(|&&k| !(k > 0.0 && k <= a)) {
            return Err(Error::InvalidParameter(format!(
                "shift {k} outside (0, {a}]"
            )));
        }
        kappa_grid.sort_by(f64::total_cmp);
        kappa_grid.dedup();
        if kappa_grid.last() != Some(&a) {
            kappa_grid.push(a);
        }
        Ok(Self {
            theta,
            a,
            kappa_grid,
            trivial_split: true,
        })
    }

    fn check(&self, p: &Exponent) -> Result<()> {
        if self.a < p.min() - 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "a = {} must be below p_- - 1 = {}",
                self.a,
                p.min() - 1.0
            )))
        }
    }

    fn check_kappa(&self, kappa: f64) -> Result<()> {
        if kappa > 0.0 && kappa <= self.a {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "shift {kappa} outside (0, {}]",
                self.a
            )))
        }
    }

    /// Block bound `k^{theta/(p_- - k)}`.
    pub fn block_bound(&self, kappa: f64, p_minus: f64) -> f64 {
        temper(kappa, self.theta, p_minus)
    }
}

/// A function together with the shift it is a block for.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub values: Field,
    pub kappa: f64,
}

/// A finite expansion `sum lambda_j b_j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BlockDecomposition {
    pub terms: Vec<(f64, Block)>,
}

impl BlockDecomposition {
    /// `sum |lambda_j|`
    pub fn cost(&self) -> f64 {
        self.terms.iter().map(|(l, _)| l.abs()).sum()
    }

    /// `sum lambda_j b_j`, accumulated term by term.
    pub fn reconstruct(&self, n: usize) -> Vec<f64> {
        let mut acc = vec![0.0; n];
        for (lambda, block) in &self.terms {
            for (a, b) in acc.iter_mut().zip(block.values.values()) {
                *a += lambda * b;
            }
        }
        acc
    }

    pub fn kappas(&self) -> Vec<f64> {
        self.terms.iter().map(|(_, b)| b.kappa).collect()
    }
}

/// One point of a shift profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaPoint {
    pub kappa: f64,
    pub weight: f64,
    pub norm: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScriptLReport {
    pub norm: f64,
    pub argmax_kappa: f64,
    pub profile: Vec<KappaPoint>,
}

/// `max_k k^{theta/(p_- - k)} ||f||_{p - k}` over the shift grid.
pub fn script_l_norm(
    space: &QuasiMetricSpace,
    p: &Exponent,
    params: &ScriptLParams,
    f: &Field,
) -> Result<ScriptLReport> {
    params.check(p)?;
    script_l_over(space, p, params, &params.kappa_grid, f)
}

fn script_l_over(
    space: &QuasiMetricSpace,
    p: &Exponent,
    params: &ScriptLParams,
    kappas: &[f64],
    f: &Field,
) -> Result<ScriptLReport> {
    let profile = kappas
        .par_iter()
        .map(|&kappa| {
            let norm = luxemburg_norm(space, &p.shift_unchecked(kappa), f, DEFAULT_TOL)?;
            let weight = params.block_bound(kappa, p.min());
            Ok(KappaPoint {
                kappa,
                weight,
                norm,
                value: weight * norm,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (norm, argmax_kappa) = profile.iter().fold((0.0, params.a), |(best, at), pt| {
        if pt.value > best {
            (pt.value, pt.kappa)
        } else {
            (best, at)
        }
    });
    Ok(ScriptLReport {
        norm,
        argmax_kappa,
        profile,
    })
}

/// `||g||_{(p - k)'}`
pub fn conjugate_shifted_norm(
    space: &QuasiMetricSpace,
    p: &Exponent,
    kappa: f64,
    g: &Field,
) -> Result<f64> {
    luxemburg_norm(space, &p.shift_unchecked(kappa).conjugate(), g, DEFAULT_TOL)
}

/// `||b||_{(p - k)'} / k^{theta/(p_- - k)}`: a block iff at most 1.
pub fn block_ratio(
    space: &QuasiMetricSpace,
    p: &Exponent,
    params: &ScriptLParams,
    b: &Field,
    kappa: f64,
) -> Result<f64> {
    params.check(p)?;
    params.check_kappa(kappa)?;
    if b.is_zero() {
        check_len(space.n(), b.len())?;
        return Ok(0.0);
    }
    Ok(conjugate_shifted_norm(space, p, kappa, b)? / params.block_bound(kappa, p.min()))
}

/// Whether `b` is a block at shift `kappa`, up to [`CERT_TOL`].
pub fn certify_block(
    space: &QuasiMetricSpace,
    p: &Exponent,
    params: &ScriptLParams,
    b: &Field,
    kappa: f64,
) -> Result<bool> {
    Ok(block_ratio(space, p, params, b, kappa)? <= 1.0 + CERT_TOL)
}

/// `(lambda, b)` with `lambda b = g` and `b` a block at `kappa`.
pub fn normalize_to_block(
    space: &QuasiMetricSpace,
    p: &Exponent,
    params: &ScriptLParams,
    g: &Field,
    kappa: f64,
) -> Result<(f64, Block)> {
    let lambda = block_ratio(space, p, params, g, kappa)?;
    if lambda == 0.0 {
        return Ok((
            0.0,
            Block {
                values: Field::zeros(g.len()),
                kappa,
            },
        ));
    }
    Ok((
        lambda,
        Block {
            values: g.scaled(1.0 / lambda),
            kappa,
        },
    ))
}

/// A block split across the two dyadic shifts around its own shift.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    /// Part with `|b| > k^{theta/(p_- - k)}`, at the smaller dyadic shift.
    pub large: Block,
    /// Remaining part, at the larger dyadic shift.
    pub small: Block,
    pub ratio_large: f64,
    pub ratio_small: f64,
    /// `max(ratio_large, ratio_small)`
    pub achieved_a: f64,
    /// Whether the unsplit block was kept.
    pub trivial: bool,
}

/// Dyadic shifts `(2^-l a, 2^-l+1 a)` enclosing `kappa`, smallest `l >= 1`.
pub fn dyadic_bracket(a: f64, kappa: f64) -> Result<(f64, f64)> {
    if !(kappa > 0.0 && kappa <= a) {
        return Err(Error::InvalidParameter(format!(
            "shift {kappa} outside (0, {a}]"
        )));
    }
    let mut l = 1;
    while a * 0.5f64.powi(l) > kappa {
        l += 1;
        if l > 1074 {
            return Err(Error::InvalidParameter(format!(
                "shift {kappa} has no dyadic bracket below {a}"
            )));
        }
    }
    Ok((a * 0.5f64.powi(l), a * 0.5f64.powi(l - 1)))
}

/// Writes the block `b` at shift `kappa` as `b_1 + b_2` with `b_1` at
/// `k_1 = 2^-l a` and `b_2` at `k_2 = 2 k_1`, `k_1 <= kappa <= k_2`.
///
/// The large values `|b| > kappa^{theta/(p_- - kappa)}` go to the smaller
/// conjugate exponent `(p - k_1)'` and the rest to `(p - k_2)'`. The achieved
/// constant is measured, not assumed.
pub fn split_block(
    space: &QuasiMetricSpace,
    p: &Exponent,
    params: &ScriptLParams,
    b: &Field,
    kappa: f64,
) -> Result<Split> {
    params.check(p)?;
    params.check_kappa(kappa)?;
    check_len(space.n(), b.len())?;
    let (k1, k2) = dyadic_bracket(params.a, kappa)?;
    let ratio = |g: &Field, k: f64| block_ratio(space, p, params, g, k);
    if params.trivial_split {
        let r = ratio(b, k1)?;
        if r <= 1.0 + space.mu_x() {
            return Ok(Split {
                large: Block {
                    values: b.clone(),
                    kappa: k1,
                },
                small: Block {
                    values: Field::zeros(b.len()),
                    kappa: k2,
                },
                ratio_large: r,
                ratio_small: 0.0,
                achieved_a: r,
                trivial: true,
            });
        }
    }
    let beta = params.block_bound(kappa, p.min());
    let large = b.map(|v| if v.abs() > beta { v } else { 0.0 })?;
    let small = b.map(|v| if v.abs() > beta { 0.0 } else { v })?;
    let ratio_large = ratio(&large, k1)?;
    let ratio_small = ratio(&small, k2)?;
    Ok(Split {
        large: Block {
            values: large,
            kappa: k1,
        },
        small: Block {
            values: small,
            kappa: k2,
        },
        ratio_large,
        ratio_small,
        achieved_a: ratio_large.max(ratio_small),
        trivial: false,
    })
}

/// Result of [`dyadic_regroup`].
#[derive(Debug, Clone, PartialEq)]
pub struct Regrouped {
    pub decomposition: BlockDecomposition,
    /// `cost(out) / cost(in)`, 1 for an empty input.
    pub inflation: f64,
    /// Largest split constant met while regrouping.
    pub max_split_a: f64,
}

/// Rewrites a decomposition so that every shift is of the form `2^-l a`.
///
/// Non-dyadic blocks are split; each part is divided by the smallest power of
/// two that makes it a block and its coefficient multiplied by the same power,
/// so the reconstruction is unchanged bit for bit.
pub fn dyadic_regroup(
    space: &QuasiMetricSpace,
    p: &Exponent,
    params: &ScriptLParams,
    decomposition: &BlockDecomposition,
) -> Result<Regrouped> {
    params.check(p)?;
    let mut terms = Vec::with_capacity(decomposition.terms.len());
    let mut max_split_a = 0.0f64;
    for (lambda, block) in &decomposition.terms {
        if is_dyadic(params.a, block.kappa) {
            terms.push((*lambda, block.clone()));
            continue;
        }
        let split = split_block(space, p, params, &block.values, block.kappa)?;
        max_split_a = max_split_a.max(split.achieved_a);
        for (part, r) in [
            (split.large, split.ratio_large),
            (split.small, split.ratio_small),
        ] {
            if part.values.is_zero() {
                continue;
            }
            let s = pow2_at_least(r);
            terms.push((
                lambda * s,
                Block {
                    values: part.values.scaled(1.0 / s),
                    kappa: part.kappa,
                },
            ));
        }
    }
    let out = BlockDecomposition { terms };
    let cost_in = decomposition.cost();
    let inflation = if cost_in == 0.0 {
        1.0
    } else {
        out.cost() / cost_in
    };
    Ok(Regrouped {
        decomposition: out,
        inflation,
        max_split_a,
    })
}

fn is_dyadic(a: f64, kappa: f64) -> bool {
    (0..1075)
        .map(|l| a * 0.5f64.powi(l))
        .take_while(|&k| k >= kappa)
        .any(|k| k == kappa)
}

fn pow2_at_least(r: f64) -> f64 {
    let mut s = 1.0;
    while s < r * (1.0 - CERT_TOL) {
        s *= 2.0;
    }
    s
}

/// Upper bound for the block space norm: the cheapest single-block expansion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HNormUpper {
    pub value: f64,
    pub kappa: f64,
    /// `(kappa, ||f||_{(p - k)'} / k^{theta/(p_- - k)})` over the grid.
    pub profile: Vec<(f64, f64)>,
}

pub fn h_norm_upper(
    space: &QuasiMetricSpace,
    p: &Exponent,
    params: &ScriptLParams,
    f: &Field,
) -> Result<HNormUpper> {
    params.check(p)?;
    let profile = params
        .kappa_grid
        .par_iter()
        .map(|&k| Ok((k, block_ratio(space, p, params, f, k)?)))
        .collect::<Result<Vec<_>>>()?;
    let (kappa, value) = profile
        .iter()
        .copied()
        .fold((params.a, f64::INFINITY), |best, pt| {
            if pt.1 < best.1 {
                pt
            } else {
                best
            }
        });
    Ok(HNormUpper {
        value,
        kappa,
        profile,
    })
}

/// `max_k (1 + 1/(p_- - k) - 1/(p_+ - k))` over the given shifts.
pub fn pairing_constant(p: &Exponent, kappas: &[f64]) -> f64 {
    kappas
        .iter()
        .map(|&k| holder_constant(&p.shift_unchecked(k)))
        .fold(1.0, f64::max)
}

/// Lower bound for the block space norm, valid up to the factor `c_p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HNormLower {
    /// `max_g |<f, g>| / ||g||_L`
    pub value: f64,
    /// Hölder constant of the worst shifted exponent on the grid.
    pub c_p: f64,
    pub best_probe: Option<usize>,
}

/// Probes `sign(f) |f|^{r - 1}` with `r = (p - k)'` pointwise, one per grid shift.
pub fn default_probes(p: &Exponent, params: &ScriptLParams, f: &Field) -> Result<Vec<Field>> {
    params
        .kappa_grid
        .iter()
        .map(|&k| {
            let r = p.shift_unchecked(k).conjugate();
            Field::new(
                f.values()
                    .iter()
                    .zip(r.values())
                    .map(|(&v, &r)| {
                        if v == 0.0 {
                            0.0
                        } else {
                            v.signum() * v.abs().powf(r - 1.0)
                        }
                    })
                    .collect(),
            )
        })
        .collect()
}

pub fn h_norm_lower(
    space: &QuasiMetricSpace,
    p: &Exponent,
    params: &ScriptLParams,
    f: &Field,
    probes: Option<&[Field]>,
) -> Result<HNormLower> {
    params.check(p)?;
    check_len(space.n(), f.len())?;
    let c_p = pairing_constant(p, &params.kappa_grid);
    let defaults;
    let probes = match probes {
        Some(probes) => probes,
        None => {
            defaults = default_probes(p, params, f)?;
            &defaults
        }
    };
    if probes.is_empty() {
        return Err(Error::EmptySet);
    }
    let ratios = probes
        .par_iter()
        .map(|g| {
            check_len(space.n(), g.len())?;
            let l = script_l_norm(space, p, params, g)?.norm;
            if l == 0.0 {
                return Ok(None);
            }
            Ok(Some(
                pairing_raw(space.weights(), f.values(), g.values()).abs() / l,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let (best_probe, value) = ratios
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (i, r)))
        .fold((None, 0.0), |(bi, bv), (i, r)| {
            if r > bv || bi.is_none() {
                (Some(i), r)
            } else {
                (bi, bv)
            }
        });
    Ok(HNormLower {
        value,
        c_p,
        best_probe,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingCheck {
    pub pairing: f64,
    pub script_l: f64,
    pub cost: f64,
    pub c_p: f64,
    pub bound: f64,
    /// `bound - |pairing|`
    pub slack: f64,
    pub holds: bool,
}

/// Checks `|<f, sum lambda_j b_j>| <= c_p ||f||_L sum |lambda_j|`, with the
/// sup-norm and `c_p` taken over the grid and the decomposition's shifts.
pub fn pairing_bound_check(
    space: &QuasiMetricSpace,
    p: &Exponent,
    params: &ScriptLParams,
    f: &Field,
    decomposition: &BlockDecomposition,
) -> Result<PairingCheck> {
    params.check(p)?;
    check_len(space.n(), f.len())?;
    let mut kappas = params.kappa_grid.clone();
    for (_, b) in &decomposition.terms {
        params.check_kappa(b.kappa)?;
        check_len(space.n(), b.values.len())?;
        kappas.push(b.kappa);
    }
    kappas.sort_by(f64::total_cmp);
    kappas.dedup();
    let script_l = script_l_over(space, p, params, &kappas, f)?.norm;
    let c_p = pairing_constant(p, &decomposition.kappas());
    let g = decomposition.reconstruct(space.n());
    let pairing = pairing_raw(space.weights(), f.values(), &g);
    let cost = decomposition.cost();
    let bound = c_p * script_l * cost;
    let slack = bound - pairing.abs();
    Ok(PairingCheck {
        pairing,
        script_l,
        cost,
        c_p,
        bound,
        slack,
        holds: slack >= -CERT_TOL * bound.max(f64::MIN_POSITIVE),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FatouReport {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub c_p: f64,
    /// Upper bounds nondecreasing along the sequence.
    pub monotone: bool,
    /// `lower <= c_p upper` at every step.
    pub sandwich: bool,
}

/// Upper and lower block-norm bounds along `0 <= f_1 <= f_2 <= ...`.
pub fn fatou_monotonicity_check(
    space: &QuasiMetricSpace,
    p: &Exponent,
    params: &ScriptLParams,
    sequence: &[Field],
) -> Result<FatouReport> {
    params.check(p)?;
    for (k, f) in sequence.iter().enumerate() {
        check_len(space.n(), f.len())?;
        if f.values().iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sequence member {k} is not nonnegative"
            )));
        }
        if k > 0
            && f.values()
                .iter()
                .zip(sequence[k - 1].values())
                .any(|(a, b)| a < b)
        {
            return Err(Error::InvalidParameter(format!(
                "sequence decreases at member {k}"
            )));
        }
    }
    let bounds = sequence
        .iter()
        .map(|f| {
            Ok((
                h_norm_upper(space, p, params, f)?.value,
                h_norm_lower(space, p, params, f, None)?.value,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let c_p = pairing_constant(p, &params.kappa_grid);
    let (upper, lower): (Vec<f64>, Vec<f64>) = bounds.into_iter().unzip();
    let monotone = upper.windows(2).all(|w| w[1] >= w[0] * (1.0 - CERT_TOL));
    let sandwich = lower
        .iter()
        .zip(&upper)
        .all(|(l, u)| *l <= c_p * u * (1.0 + CERT_TOL));
    Ok(FatouReport {
        upper,
        lower,
        c_p,
        monotone,
        sandwich,
    })
}

/// Point sets of the balls `B(x_0, 2^j)` around point 0, one per `j`; finite
/// stand-ins for an exhaustion of an infinite-measure space.
pub fn exhaustion(space: &QuasiMetricSpace, levels: &[i32]) -> Result<Vec<Vec<usize>>> {
    levels
        .iter()
        .map(|&j| space.ball(0, 2f64.powi(j) * (1.0 + crate::space::RADIUS_BUMP)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(level: u32) -> QuasiMetricSpace {
        QuasiMetricSpace::uniform_dyadic(level).unwrap()
    }

    #[test]
    fn grid_contains_a() {
        let params = ScriptLParams::dyadic(1.0, 0.5, 3).unwrap();
        assert_eq!(params.kappa_grid, vec![0.0625, 0.125, 0.25, 0.5]);
        assert!(ScriptLParams::with_grid(1.0, 0.5, vec![0.6]).is_err());
        assert_eq!(
            ScriptLParams::with_grid(-1.0, 0.5, vec![0.1])
                .unwrap()
                .kappa_grid,
            vec![0.1, 0.5]
        );
    }

    #[test]
    fn normalize_closed_form() {
        // (2 - k)' = 4 for k = 2/3; with constant |g| = 3 the norm is 3.
        let s = unit(3);
        let p = Exponent::constant(8, 2.0).unwrap();
        let params = ScriptLParams::with_grid(0.0, 0.75, vec![2.0 / 3.0]).unwrap();
        let g = Field::new(vec![3.0, -3.0, 3.0, 3.0, -3.0, 3.0, 3.0, 3.0]).unwrap();
        let (lambda, b) = normalize_to_block(&s, &p, &params, &g, 2.0 / 3.0).unwrap();
        assert!((lambda - 3.0).abs() < 1e-11);
        assert!(certify_block(&s, &p, &params, &b.values, b.kappa).unwrap());
        assert!(!certify_block(&s, &p, &params, &b.values.scaled(2.0), b.kappa).unwrap());
        let (zero, zb) = normalize_to_block(&s, &p, &params, &Field::zeros(8), 0.5).unwrap();
        assert_eq!(zero, 0.0);
        assert!(zb.values.is_zero());
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(dyadic_bracket(1.0, 0.75).unwrap(), (0.5, 1.0));
        assert_eq!(dyadic_bracket(1.0, 1.0).unwrap(), (0.5, 1.0));
        assert_eq!(dyadic_bracket(1.0, 0.5).unwrap(), (0.5, 1.0));
        assert_eq!(dyadic_bracket(1.0, 0.3).unwrap(), (0.25, 0.5));
        assert!(dyadic_bracket(1.0, 1.5).is_err());
    }

    #[test]
    fn regroup_non_dyadic_block() {
        let s = unit(4);
        let p = Exponent::new((0..16).map(|i| 2.5 + 0.05 * i as f64).collect()).unwrap();
        let mut params = ScriptLParams::dyadic(1.0, 1.0, 6).unwrap();
        params.trivial_split = false;
        let g = Field::new(
            (0..16)
                .map(|i| ((i * 7 % 5) as f64 - 2.0) * 10f64.powi(i % 3 - 1))
                .collect(),
        )
        .unwrap();
        let (lambda, b) = normalize_to_block(&s, &p, &params, &g, 0.75).unwrap();
        let dec = BlockDecomposition {
            terms: vec![(lambda, b)],
        };
        let out = dyadic_regroup(&s, &p, &params, &dec).unwrap();
        assert_eq!(out.decomposition.kappas(), vec![0.5, 1.0]);
        assert_eq!(out.decomposition.reconstruct(16), dec.reconstruct(16));
        for (_, b) in &out.decomposition.terms {
            assert!(certify_block(&s, &p, &params, &b.values, b.kappa).unwrap());
        }
        assert!(out.inflation >= 1.0 && out.inflation <= 2.0 * 2.0 * out.max_split_a.max(1.0));
        let empty = dyadic_regroup(&s, &p, &params, &BlockDecomposition::default()).unwrap();
        assert!(empty.decomposition.terms.is_empty());
    }

    #[test]
    fn upper_bound_of_block_is_at_most_one() {
        let s = unit(4);
        let p = Exponent::constant(16, 2.5).unwrap();
        let params = ScriptLParams::dyadic(1.0, 1.0, 8).unwrap();
        let g = Field::new((0..16).map(|i| (i as f64).sin() + 0.1).collect()).unwrap();
        let (_, b) = normalize_to_block(&s, &p, &params, &g, 0.25).unwrap();
        assert!(h_norm_upper(&s, &p, &params, &b.values).unwrap().value <= 1.0 + 1e-9);
        assert_eq!(
            h_norm_upper(&s, &p, &params, &Field::zeros(16))
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn fatou_rejects_decreasing_sequences() {
        let s = unit(2);
        let p = Exponent::constant(4, 2.0).unwrap();
        let params = ScriptLParams::dyadic(1.0, 0.5, 4).unwrap();
        let f1 = Field::new(vec![1.0; 4]).unwrap();
        let f0 = Field::new(vec![0.5; 4]).unwrap();
        assert!(fatou_monotonicity_check(&s, &p, &params, &[f1.clone(), f0.clone()]).is_err());
        let r = fatou_monotonicity_check(&s, &p, &params, &[f0, f1]).unwrap();
        assert!(r.monotone && r.sandwich);
    }
}
