use num_complex::Complex64;
use serde::Serialize;

use crate::diagnostics::Warning;
use crate::laplace::{Refinement, TailModel, WidderReport};
use crate::residue::PoleSpec;

/// Numerical side information of a solve.
#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    /// Measured decay exponent of the transform (null when it vanishes).
    pub p_hat: f64,
    /// Certified classical derivatives at 0; null means unlimited.
    pub certified_derivatives: Option<usize>,
    pub condition_number: f64,
    pub widder: WidderReport,
    pub refinement: Option<Refinement>,
    pub tail_model: Option<TailModel>,
    pub max_imag: f64,
    #[serde(serialize_with = "crate::cjson::many")]
    pub l_values: Vec<Complex64>,
    pub r0_identity_error: Option<f64>,
    pub warnings: Vec<Warning>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LaurentEntry {
    pub pole: PoleSpec,
    #[serde(serialize_with = "crate::cjson::many")]
    pub coeffs: Vec<Complex64>,
}

/// The JSON solution report.
#[derive(Clone, Debug, Serialize)]
pub struct SolutionReport {
    pub poles: Vec<PoleSpec>,
    pub laurent: Vec<LaurentEntry>,
    pub r0: String,
    #[serde(serialize_with = "crate::cjson::many")]
    pub trace: Vec<Complex64>,
    pub diagnostics: Diagnostics,
}
