//! Truncation and small-shift diagnostics for membership in the closure of
//! bounded functions inside a grand Morrey space.
//!
//! On a single finite space every function is bounded, so membership is only
//! meaningful along a refinement family. [`closure_diagnostic`] evaluates two
//! profiles on every level:
//!
//! * the tail profile `N -> ||f chi_{|f| > N}||` in the grand norm, which
//!   tends to 0 exactly for members;
//! * the small-shift profile `c -> c^{theta/(p_- - c)} ||f||_{L^{p - c, lambda}}`,
//!   which tends to 0 as `c -> 0` exactly for members.
//!
//! A probe (a value of `N` or `c`) counts only once its value has settled
//! across the finest levels. The verdict then reads the decay of the settled
//! part of the profile toward its limit end.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::exponent::{log_holder_constant, Exponent, MorreyExponent};
use crate::lebesgue::{Field, DEFAULT_TOL};
use crate::morrey::{grand_morrey_norm, shifted_morrey_norms, temper, GrandParams};
use crate::space::QuasiMetricSpace;

/// `f chi_{|f| <= N}`.
pub fn truncate(f: &Field, n: f64) -> Result<Field> {
    check_level(n)?;
    f.map(|v| if v.abs() <= n { v } else { 0.0 })
}

/// `f chi_{|f| > N}`.
pub fn tail(f: &Field, n: f64) -> Result<Field> {
    check_level(n)?;
    f.map(|v| if v.abs() > n { v } else { 0.0 })
}

fn check_level(n: f64) -> Result<()> {
    if n > 0.0 && !n.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "truncation level must be positive, got {n}"
        )))
    }
}

/// Grand Morrey norms of `tail(f, N)` for increasing `N`.
pub fn tail_profile(
    space: &QuasiMetricSpace,
    p: &Exponent,
    lambda: &MorreyExponent,
    params: &GrandParams,
    f: &Field,
    levels: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    if levels.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(
            "truncation levels must increase".into(),
        ));
    }
    levels
        .par_iter()
        .map(|&n| Ok(grand_morrey_norm(space, p, lambda, params, &tail(f, n)?, tol)?.norm))
        .collect()
}

/// `c -> c^{theta/(p_- - c)} ||f||_{L^{p - c, lambda}}` for decreasing `c`.
pub fn small_c_profile(
    space: &QuasiMetricSpace,
    p: &Exponent,
    lambda: &MorreyExponent,
    theta: f64,
    f: &Field,
    shifts: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    if shifts.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::InvalidParameter(
            "small-shift list must decrease".into(),
        ));
    }
    let norms = shifted_morrey_norms(space, p, lambda, f, shifts, tol)?;
    Ok(shifts
        .iter()
        .zip(norms)
        .map(|(&c, v)| temper(c, theta, p.min()) * v)
        .collect())
}

/// One member of a refinement family.
#[derive(Debug, Clone)]
pub struct DiagnosticLevel {
    pub space: QuasiMetricSpace,
    pub p: Exponent,
    pub lambda: MorreyExponent,
    pub f: Field,
}

impl DiagnosticLevel {
    pub fn new(
        space: QuasiMetricSpace,
        p: Exponent,
        lambda: MorreyExponent,
        f: Field,
    ) -> Result<Self> {
        check_len(space.n(), p.len())?;
        check_len(space.n(), lambda.len())?;
        check_len(space.n(), f.len())?;
        Ok(Self {
            space,
            p,
            lambda,
            f,
        })
    }
}

/// Settings of [`closure_diagnostic`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticConfig {
    /// Truncation levels; default `2, 4, ..., 64`.
    pub truncation_levels: Option<Vec<f64>>,
    /// Decreasing shifts; default 16 geometric points from `(p_- - 1)/2` to `(p_- - 1)/100`.
    pub shifts: Option<Vec<f64>>,
    /// Largest relative change between the finest levels for a settled probe.
    pub trend_tol: f64,
    /// Smallest log-log decay rate read as vanishing.
    pub vanish_slope: f64,
    /// Report log-Hölder and doubling constants of the finest level.
    pub regularity_check: bool,
    pub tol: f64,
}

impl Default for DiagnosticConfig {
    fn default() -> Self {
        Self {
            truncation_levels: None,
            shifts: None,
            trend_tol: 0.05,
            vanish_slope: 0.25,
            regularity_check: true,
            tol: DEFAULT_TOL,
        }
    }
}

impl DiagnosticConfig {
    fn truncation_levels(&self) -> Vec<f64> {
        self.truncation_levels
            .clone()
            .unwrap_or_else(|| (1..=6).map(|k| f64::from(1u32 << k)).collect())
    }

    fn shifts(&self, p_minus: f64) -> Vec<f64> {
        self.shifts.clone().unwrap_or_else(|| {
            let span = p_minus - 1.0;
            (0..16)
                .map(|k| 0.5 * span * 0.02f64.powf(k as f64 / 15.0))
                .collect()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Vanishes,
    Persists,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Vanishes => "VANISHES",
            Verdict::Persists => "PERSISTS",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Verdict of one profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileVerdict {
    pub verdict: Verdict,
    /// Finest-level value at the settled probe closest to the limit end.
    pub estimate: Option<f64>,
    /// `ln(P(t_0) / P(t_*)) / |ln(t_* / t_0)|` over the settled probes.
    pub decay_rate: Option<f64>,
    /// Which probes settled across the finest levels.
    pub settled: Vec<bool>,
}

/// Profiles of one refinement level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelProfiles {
    pub n: usize,
    pub tail: Vec<f64>,
    pub small_c: Vec<f64>,
}

/// Regularity constants of the finest level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Regularity {
    pub log_holder: f64,
    /// `max_c a_LH(1 / (p - c))` over the shift list.
    pub log_holder_reciprocal_shifted: f64,
    pub doubling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureReport {
    pub truncation_levels: Vec<f64>,
    pub shifts: Vec<f64>,
    pub levels: Vec<LevelProfiles>,
    pub tail: ProfileVerdict,
    pub small_c: ProfileVerdict,
    pub agree: bool,
    pub regularity: Option<Regularity>,
}

/// Runs both profiles on every level of a refinement family (coarse to fine)
/// and reads a verdict from each.
pub fn closure_diagnostic(
    levels: &[DiagnosticLevel],
    params: &GrandParams,
    config: &DiagnosticConfig,
) -> Result<ClosureReport> {
    let finest = levels.last().ok_or(Error::EmptySet)?;
    if !(config.trend_tol > 0.0 && config.vanish_slope > 0.0) {
        return Err(Error::InvalidParameter(
            "trend tolerance and vanish slope must be positive".into(),
        ));
    }
    let truncation_levels = config.truncation_levels();
    let shifts = config.shifts(finest.p.min());
    let profiles = levels
        .par_iter()
        .map(|lv| {
            let tail = tail_profile(
                &lv.space,
                &lv.p,
                &lv.lambda,
                params,
                &lv.f,
                &truncation_levels,
                config.tol,
            )?;
            let small_c = small_c_profile(
                &lv.space,
                &lv.p,
                &lv.lambda,
                params.theta,
                &lv.f,
                &shifts,
                config.tol,
            )?;
            Ok(LevelProfiles {
                n: lv.space.n(),
                tail,
                small_c,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tail_rows: Vec<&[f64]> = profiles.iter().map(|l| l.tail.as_slice()).collect();
    let small_rows: Vec<&[f64]> = profiles.iter().map(|l| l.small_c.as_slice()).collect();
    let tail = judge(&tail_rows, &truncation_levels, config);
    let small_c = judge(&small_rows, &shifts, config);
    let agree = tail.verdict == small_c.verdict && tail.verdict != Verdict::Inconclusive;
    let regularity = if config.regularity_check {
        Some(regularity(finest, &shifts)?)
    } else {
        None
    };
    Ok(ClosureReport {
        truncation_levels,
        shifts,
        levels: profiles,
        tail,
        small_c,
        agree,
        regularity,
    })
}

fn regularity(level: &DiagnosticLevel, shifts: &[f64]) -> Result<Regularity> {
    let (log_holder, log_holder_reciprocal_shifted) = if level.p.is_constant() {
        (0.0, 0.0)
    } else {
        let mut worst = 0.0f64;
        for &c in shifts {
            let r: Vec<f64> = level.p.values().iter().map(|p| 1.0 / (p - c)).collect();
            worst = worst.max(log_holder_constant(&level.space, &r)?);
        }
        (log_holder_constant(&level.space, level.p.values())?, worst)
    };
    Ok(Regularity {
        log_holder,
        log_holder_reciprocal_shifted,
        doubling: level.space.doubling_constant(),
    })
}

/// Reads a verdict from per-level profiles `rows[level][probe]`, probes
/// ordered toward the limit end.
pub(crate) fn judge(rows: &[&[f64]], probes: &[f64], config: &DiagnosticConfig) -> ProfileVerdict {
    let inconclusive = |settled| ProfileVerdict {
        verdict: Verdict::Inconclusive,
        estimate: None,
        decay_rate: None,
        settled,
    };
    let Some(fine) = rows.last() else {
        return inconclusive(Vec::new());
    };
    if rows.len() < 2 || probes.is_empty() {
        return inconclusive(vec![false; probes.len()]);
    }
    let coarse = rows[rows.len() - 2];
    let last = probes.len() - 1;
    if fine[last] == 0.0 && coarse[last] == 0.0 {
        return ProfileVerdict {
            verdict: Verdict::Vanishes,
            estimate: Some(0.0),
            decay_rate: None,
            settled: (0..probes.len()).map(|k| fine[k] == coarse[k]).collect(),
        };
    }
    let settled: Vec<bool> = (0..probes.len())
        .map(|k| {
            let series: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            has_settled(&series, config.trend_tol)
        })
        .collect();
    let idx: Vec<usize> = (0..probes.len()).filter(|&k| settled[k]).collect();
    let (Some(&k0), Some(&k1)) = (idx.first(), idx.last()) else {
        return inconclusive(settled);
    };
    if idx.len() < 2 {
        return inconclusive(settled);
    }
    let estimate = fine[k1];
    if estimate == 0.0 {
        return ProfileVerdict {
            verdict: Verdict::Vanishes,
            estimate: Some(0.0),
            decay_rate: None,
            settled,
        };
    }
    let rate = (fine[k0] / estimate).ln() / (probes[k1] / probes[k0]).ln().abs();
    let verdict = if rate >= config.vanish_slope {
        Verdict::Vanishes
    } else {
        Verdict::Persists
    };
    ProfileVerdict {
        verdict,
        estimate: Some(estimate),
        decay_rate: Some(rate),
        settled,
    }
}

/// Whether the refinement series of one probe has settled: small change
/// between the two finest levels and, with three or more levels, a small
/// geometric extrapolation of the remaining change.
fn has_settled(series: &[f64], tol: f64) -> bool {
    let l = series.len();
    let (prev, last) = (series[l - 2], series[l - 1]);
    let d2 = last - prev;
    let scale = last.abs();
    if d2 == 0.0 {
        return true;
    }
    if d2.abs() > tol * scale {
        return false;
    }
    if l < 3 {
        return true;
    }
    let d1 = prev - series[l - 3];
    if d1 == 0.0 {
        return false;
    }
    let rho = (d2 / d1).abs();
    rho < 1.0 && d2.abs() * rho / (1.0 - rho) <= tol * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_examples() {
        let f = Field::new(vec![3.0, 1.0, 5.0]).unwrap();
        assert_eq!(truncate(&f, 2.0).unwrap().values(), &[0.0, 1.0, 0.0]);
        assert_eq!(tail(&f, 2.0).unwrap().values(), &[3.0, 0.0, 5.0]);
        assert!(tail(&f, 5.0).unwrap().is_zero());
        assert!(truncate(&f, 1e-300).unwrap().is_zero());
        assert!(truncate(&f, 0.0).is_err());
    }

    fn config() -> DiagnosticConfig {
        DiagnosticConfig::default()
    }

    #[test]
    fn judge_flat_profile_persists() {
        let rows: Vec<Vec<f64>> = (0..3)
            .map(|l| vec![1.4 - 0.001 / (l + 1) as f64; 5])
            .collect();
        let rows: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let v = judge(&rows, &[0.5, 0.25, 0.1, 0.05, 0.01], &config());
        assert_eq!(v.verdict, Verdict::Persists);
    }

    #[test]
    fn judge_power_decay_vanishes() {
        let probes = [0.5, 0.25, 0.1, 0.05, 0.01];
        let row: Vec<f64> = probes.iter().map(|c: &f64| c.sqrt()).collect();
        let rows = [row.as_slice(), row.as_slice()];
        let v = judge(&rows, &probes, &config());
        assert_eq!(v.verdict, Verdict::Vanishes);
        assert!((v.decay_rate.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn judge_drifting_probes_are_not_settled() {
        // The last probe still drifts by a constant ratio per level.
        let rows = [vec![1.0, 0.5], vec![1.0, 0.6], vec![1.0, 0.68]];
        let rows: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let v = judge(&rows, &[0.5, 0.01], &config());
        assert_eq!(v.settled, vec![true, false]);
        assert_eq!(v.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn single_level_is_inconclusive() {
        let row = [1.0, 0.5];
        let v = judge(&[&row], &[0.5, 0.01], &config());
        assert_eq!(v.verdict, Verdict::Inconclusive);
    }
}
