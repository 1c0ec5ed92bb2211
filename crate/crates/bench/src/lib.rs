//! Fixtures shared by the benchmarks.

use grandnorm_core::io::values_from_spec;
use grandnorm_core::{
    DiagnosticLevel, Exponent, Field, GrandParams, MorreyExponent, QuasiMetricSpace, Result,
    ScriptLParams,
};

/// A graded dyadic space with a variable exponent, Morrey exponent and a
/// singular field.
pub struct Fixture {
    pub space: QuasiMetricSpace,
    pub p: Exponent,
    pub lambda: MorreyExponent,
    pub f: Field,
}

fn values(spec: &str, space: &QuasiMetricSpace) -> Result<Vec<f64>> {
    Ok(values_from_spec(spec, space)?.expect("generator spec"))
}

impl Fixture {
    pub fn graded(level: u32) -> Result<Self> {
        let space = QuasiMetricSpace::graded_dyadic(level)?;
        let p = Exponent::new(values("affine:2.2,0.6", &space)?)?;
        let lambda = MorreyExponent::new(values("affine:0.2,0.4", &space)?)?;
        let f = Field::new(values("power:0.4", &space)?)?;
        Ok(Self {
            space,
            p,
            lambda,
            f,
        })
    }

    pub fn level(self) -> Result<DiagnosticLevel> {
        DiagnosticLevel::new(self.space, self.p, self.lambda, self.f)
    }
}

pub fn grand_params() -> GrandParams {
    GrandParams::new(1.0, 16, 1e-2).expect("valid parameters")
}

pub fn script_params(p: &Exponent) -> ScriptLParams {
    ScriptLParams::dyadic(1.0, 0.5 * (p.min() - 1.0), 12).expect("valid parameters")
}
