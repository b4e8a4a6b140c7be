//! Complexity measures of the effect and state classes: Rademacher
//! estimates, matrix-series bounds, shattering certificates, covering
//! numbers and sample-complexity formulas.
//!
//! Every class here is a compact convex set `C` of Hermitian matrices acting
//! on inputs by `x ↦ ⟨E, x⟩`. Suprema over `C` are computed in closed form
//! from the spectrum of the argument.

mod covering;
mod feasibility;
mod quote;
mod rademacher;
mod shatter;

pub use covering::{covering_estimate, CoveringEstimate, CoveringSource, LpMetric};
pub use feasibility::{FeasibilityConfig, FeasibilityMethod};
pub use quote::{sample_complexity_quote, QuoteFormula, SampleComplexityQuote};
pub use rademacher::{
    khintchine_ratio, rademacher_complexity, rademacher_series_norm, tropp_bound,
    KhintchineEstimate, SeriesNorm,
};
pub use shatter::{
    certify_shattering, fat_lower_bound_search, fat_upper_bound, mendelson_criterion,
    separability_check, FatSearchResult, FatUpperBound, MendelsonVerdict, SearchStrategy,
    SeparabilityReport, ShatteringCertificate, ShatteringOutcome, Witnesses,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::HermitianMatrix;

/// Hypothesis classes of linear functionals on `d × d` Hermitian inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HypothesisClass {
    /// All effects `0 ≤ E ≤ I`.
    EffectSpace,
    /// All density matrices.
    StateSpace,
    /// Convex hull of the rank-`k` projectors: `0 ≤ E ≤ I`, `Tr E = k`.
    RankK { k: usize },
    /// The trace-norm unit ball.
    #[serde(rename = "symmetrized_s1")]
    SymmetrizedS1,
    /// The operator-norm unit ball, `−I ≤ E ≤ I`.
    #[serde(rename = "symmetrized_sinf")]
    SymmetrizedSInf,
}

impl HypothesisClass {
    pub fn name(&self) -> String {
        match self {
            HypothesisClass::EffectSpace => "effect".into(),
            HypothesisClass::StateSpace => "state".into(),
            HypothesisClass::RankK { k } => format!("rank{k}"),
            HypothesisClass::SymmetrizedS1 => "s1".into(),
            HypothesisClass::SymmetrizedSInf => "sinf".into(),
        }
    }

    /// Checks the class makes sense in dimension `d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        if d == 0 {
            return Err(Error::InvalidDimension(d));
        }
        if let HypothesisClass::RankK { k } = *self {
            if k > d {
                return Err(Error::InvalidRank { rank: k, dim: d });
            }
        }
        Ok(())
    }

    /// Whether the class is on the measurement side (effects acting on
    /// states) rather than the state side.
    pub fn is_effect_side(&self) -> bool {
        matches!(
            self,
            HypothesisClass::EffectSpace
                | HypothesisClass::RankK { .. }
                | HypothesisClass::SymmetrizedSInf
        )
    }

    /// A canonical interior point: `I/2`, `I/d`, `(k/d) I` or `0`.
    pub fn center(&self, d: usize) -> HermitianMatrix {
        let id = HermitianMatrix::identity(d);
        match *self {
            HypothesisClass::EffectSpace => id.scale(0.5),
            HypothesisClass::StateSpace => id.scale(1.0 / d as f64),
            HypothesisClass::RankK { k } => id.scale(k as f64 / d as f64),
            HypothesisClass::SymmetrizedS1 | HypothesisClass::SymmetrizedSInf => {
                HermitianMatrix::zeros(d)
            }
        }
    }

    /// Eigenvalue-level projection onto the class.
    pub(crate) fn project_values(&self, values: &[f64]) -> Vec<f64> {
        match *self {
            HypothesisClass::EffectSpace => values.iter().map(|l| l.clamp(0.0, 1.0)).collect(),
            HypothesisClass::StateSpace => crate::matrix::project_simplex(values, 1.0),
            HypothesisClass::RankK { k } => {
                crate::matrix::project_capped_simplex(values, k as f64)
            }
            HypothesisClass::SymmetrizedSInf => {
                values.iter().map(|l| l.clamp(-1.0, 1.0)).collect()
            }
            HypothesisClass::SymmetrizedS1 => crate::matrix::project_l1_ball(values, 1.0),
        }
    }

    /// Euclidean (Frobenius) projection of `m` onto the class.
    pub fn project(&self, m: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.validate(m.dim())?;
        let spec = m.eig()?;
        Ok(spec.with_eigenvalues(&self.project_values(&spec.eigenvalues)))
    }

    /// Distance-free membership test: spectrum constraints hold within `tol`.
    pub fn contains(&self, m: &HermitianMatrix, tol: f64) -> Result<bool> {
        self.validate(m.dim())?;
        let l = m.eig()?.eigenvalues;
        let (lo, hi) = (l[l.len() - 1], l[0]);
        let tr: f64 = l.iter().sum();
        Ok(match *self {
            HypothesisClass::EffectSpace => lo >= -tol && hi <= 1.0 + tol,
            HypothesisClass::StateSpace => lo >= -tol && (tr - 1.0).abs() <= tol,
            HypothesisClass::RankK { k } => {
                lo >= -tol && hi <= 1.0 + tol && (tr - k as f64).abs() <= tol
            }
            HypothesisClass::SymmetrizedSInf => lo >= -1.0 - tol && hi <= 1.0 + tol,
            HypothesisClass::SymmetrizedS1 => l.iter().map(|x| x.abs()).sum::<f64>() <= 1.0 + tol,
        })
    }
}

impl fmt::Display for HypothesisClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for HypothesisClass {
    type Err = Error;

    /// Accepts `effect`, `state`, `s1`, `sinf` and `rankK` (e.g. `rank2`).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        match t.as_str() {
            "effect" | "effectspace" => Ok(HypothesisClass::EffectSpace),
            "state" | "statespace" => Ok(HypothesisClass::StateSpace),
            "s1" | "symmetrizeds1" => Ok(HypothesisClass::SymmetrizedS1),
            "sinf" | "symmetrizedsinf" => Ok(HypothesisClass::SymmetrizedSInf),
            _ => t
                .strip_prefix("rankk")
                .or_else(|| t.strip_prefix("rank"))
                .and_then(|k| k.parse().ok())
                .map(|k| HypothesisClass::RankK { k })
                .ok_or_else(|| Error::InvalidParameter(format!("unknown class '{s}'"))),
        }
    }
}

/// `h_C(M) = max_{E ∈ C} ⟨E, M⟩` from the descending spectrum of `M`.
pub(crate) fn support_of_values(class: HypothesisClass, values: &[f64]) -> f64 {
    match class {
        HypothesisClass::EffectSpace => values.iter().filter(|&&l| l > 0.0).sum(),
        HypothesisClass::StateSpace => values[0],
        HypothesisClass::RankK { k } => values[..k].iter().sum(),
        HypothesisClass::SymmetrizedSInf => values.iter().map(|l| l.abs()).sum(),
        HypothesisClass::SymmetrizedS1 => values.iter().fold(0.0, |a, l| a.max(l.abs())),
    }
}

/// Support function `max_{E ∈ C} ⟨E, M⟩`.
pub fn support_function(class: HypothesisClass, m: &HermitianMatrix) -> Result<f64> {
    class.validate(m.dim())?;
    Ok(support_of_values(class, &m.eig()?.eigenvalues))
}

pub(crate) fn dual_sup_of_values(class: HypothesisClass, values: &[f64]) -> f64 {
    let neg: Vec<f64> = values.iter().rev().map(|l| -l).collect();
    support_of_values(class, values)
        .max(support_of_values(class, &neg))
        .max(0.0)
}

/// `sup_{E ∈ C} |⟨E, M⟩|` in closed form.
///
/// `SymmetrizedSInf` gives `‖M‖₁`, `SymmetrizedS1` and `StateSpace` give
/// `‖M‖_∞`, `EffectSpace` gives `max(Σλ⁺, Σ|λ⁻|)`, and `RankK` compares the
/// top-`k` and bottom-`k` eigenvalue sums.
pub fn dual_sup(class: HypothesisClass, m: &HermitianMatrix) -> Result<f64> {
    class.validate(m.dim())?;
    Ok(dual_sup_of_values(class, &m.eig()?.eigenvalues))
}

/// A Monte Carlo estimate next to the bound it is compared against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    pub value: f64,
    /// `NaN` (serialized as `null`) for a single trial.
    pub std_error: f64,
    pub trials: usize,
    pub bound_value: f64,
    pub bound_name: String,
    /// The bound holds only up to an unspecified constant; reported with
    /// constant 1.
    pub order_only: bool,
}

impl ComplexityEstimate {
    pub fn to_json(&self) -> Result<String> {
        crate::wire::to_json(self)
    }
}
