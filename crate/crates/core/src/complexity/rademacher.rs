//! Rademacher series `Σ γᵢ xᵢ` and the Monte Carlo estimators built on them.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{dual_sup_of_values, ComplexityEstimate, HypothesisClass};
use crate::ensembles::RngSeed;
use crate::error::{Error, Result};
use crate::learners::mean_stderr;
use crate::scalar::tolerance;
use crate::HermitianMatrix;

/// Which Schatten norm to take of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesNorm {
    Trace,
    Operator,
}

fn check_points(points: &[HermitianMatrix]) -> Result<usize> {
    let d = points.first().ok_or(Error::EmptyData)?.dim();
    for x in points {
        if x.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: x.dim(),
            });
        }
    }
    Ok(d)
}

fn series(points: &[HermitianMatrix], signs: &[f64]) -> Result<HermitianMatrix> {
    let mut m = HermitianMatrix::zeros(points[0].dim());
    for (x, &g) in points.iter().zip(signs) {
        m.axpy(g, x)?;
    }
    Ok(m)
}

fn random_signs<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

/// `‖Σ γᵢ xᵢ‖` for a fixed sign vector.
pub fn rademacher_series_norm(
    points: &[HermitianMatrix],
    signs: &[f64],
    norm: SeriesNorm,
) -> Result<f64> {
    check_points(points)?;
    if points.len() != signs.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            found: signs.len(),
        });
    }
    if let Some(g) = signs.iter().find(|g| g.abs() != 1.0) {
        return Err(Error::InvalidParameter(format!("sign {g} is not ±1")));
    }
    let l = series(points, signs)?.eig()?.eigenvalues;
    Ok(match norm {
        SeriesNorm::Trace => l.iter().map(|x| x.abs()).sum(),
        SeriesNorm::Operator => l.iter().fold(0.0, |a, x| a.max(x.abs())),
    })
}

/// Estimates `ℛ̂ₙ(C) = (1/√n) E_γ sup_{E ∈ C} |⟨E, Σ γᵢ xᵢ⟩|` by Monte Carlo,
/// evaluating the supremum in closed form with [`super::dual_sup`].
///
/// Trial `t` draws its signs from `seed.child(t)`, so results do not depend
/// on the thread count. The comparison bound is `√d` (order only) for
/// measurement-side classes and `√(2 ln d)` for state-side classes.
pub fn rademacher_complexity(
    class: HypothesisClass,
    points: &[HermitianMatrix],
    trials: usize,
    seed: RngSeed,
) -> Result<ComplexityEstimate> {
    let d = check_points(points)?;
    class.validate(d)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let n = points.len();
    let scale = 1.0 / (n as f64).sqrt();
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let mut rng = seed.child(t as u64).rng();
            let s = series(points, &random_signs(n, &mut rng))?;
            Ok(dual_sup_of_values(class, &s.eig()?.eigenvalues) * scale)
        })
        .collect::<Result<_>>()?;
    let (value, std_error) = mean_stderr(&values);
    let (bound_value, bound_name, order_only) = if class.is_effect_side() {
        ((d as f64).sqrt(), "sqrt(d)", true)
    } else {
        ((2.0 * (d as f64).ln()).sqrt(), "sqrt(2 ln d)", false)
    };
    Ok(ComplexityEstimate {
        value,
        std_error,
        trials,
        bound_value,
        bound_name: bound_name.into(),
        order_only,
    })
}

/// Matrix Khintchine bound `√(2σ² ln d)` with `σ² = ‖Σ xᵢ²‖_∞`.
pub fn tropp_bound(points: &[HermitianMatrix]) -> Result<f64> {
    let d = check_points(points)?;
    let mut v = HermitianMatrix::zeros(d);
    for x in points {
        v.axpy(1.0, &x.square())?;
    }
    let sigma2 = v.eig()?.eigenvalues[0].max(0.0);
    Ok((2.0 * sigma2 * (d as f64).ln()).sqrt())
}

/// Empirical constant `ĉ = Ê‖Σ γᵢ xᵢ‖₁ / √(nd)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KhintchineEstimate {
    pub ratio: f64,
    pub std_error: f64,
    pub trials: usize,
    pub n: usize,
    pub d: usize,
}

/// Estimates the trace-norm Khintchine constant for inputs in the trace-norm
/// unit ball.
pub fn khintchine_ratio(
    points: &[HermitianMatrix],
    trials: usize,
    seed: RngSeed,
) -> Result<KhintchineEstimate> {
    let d = check_points(points)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    for (index, x) in points.iter().enumerate() {
        let norm: f64 = x.eig()?.eigenvalues.iter().map(|l| l.abs()).sum();
        if norm > 1.0 + tolerance::MARGIN_SLACK {
            return Err(Error::NormViolation { index, norm });
        }
    }
    let n = points.len();
    let scale = 1.0 / ((n * d) as f64).sqrt();
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let mut rng = seed.child(t as u64).rng();
            let signs = random_signs(n, &mut rng);
            Ok(rademacher_series_norm(points, &signs, SeriesNorm::Trace)? * scale)
        })
        .collect::<Result<_>>()?;
    let (ratio, std_error) = mean_stderr(&values);
    Ok(KhintchineEstimate {
        ratio,
        std_error,
        trials,
        n,
        d,
    })
}
