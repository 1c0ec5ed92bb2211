//! Variable-exponent Lebesgue, Morrey and grand-space norms on finite
//! discretizations of quasi-metric measure spaces.
//!
//! The crate is organized bottom-up:
//!
//! * [`space`]: finite quasi-metric measure spaces, balls and structural constants;
//! * [`exponent`]: variable exponents and their regularity diagnostics;
//! * [`lebesgue`]: modulars, Luxemburg norms and the Hölder pairing;
//! * [`morrey`]: variable Morrey norms and their grand versions;
//! * [`density`]: truncation and small-shift diagnostics on refinement families;
//! * [`predual`]: the tempered sup-norm over shifted Lebesgue spaces, its blocks
//!   and the two-sided bounds for the block space norm;
//! * [`io`]: the plain-text input formats and symbolic generators.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod error;
pub mod exponent;
pub mod io;
pub mod lebesgue;
pub mod morrey;
pub mod predual;
pub mod space;

pub use density::{
    closure_diagnostic, small_c_profile, tail, tail_profile, truncate, ClosureReport,
    DiagnosticConfig, DiagnosticLevel, Verdict,
};
pub use error::{Error, Result};
pub use exponent::{diening_sup, log_holder_constant, DieningSup, Exponent, MorreyExponent};
pub use lebesgue::{
    embedding_constant, holder_constant, luxemburg_norm, luxemburg_norm_bisection, modular,
    pairing, Field, DEFAULT_TOL,
};
pub use morrey::{
    embedding_chain_report, equivalent_grand_norm, grand_lebesgue_norm, grand_morrey_norm,
    morrey_norm, EmbeddingChain, GrandParams, GrandReport, ProfilePoint,
};
pub use predual::{
    certify_block, dyadic_regroup, fatou_monotonicity_check, h_norm_lower, h_norm_upper,
    normalize_to_block, pairing_bound_check, script_l_norm, split_block, Block, BlockDecomposition,
    ScriptLParams,
};
pub use space::{Metric, NestedBalls, QuasiMetricSpace};
