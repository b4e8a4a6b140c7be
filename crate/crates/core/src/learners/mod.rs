//! Empirical risk minimization over effects and states, plus the Bloch-space
//! network learners.
//!
//! The effect and state learners run projected gradient descent on the
//! empirical risk `(1/n) Σ ℓ(Tr(X xᵢ), yᵢ)`; every iterate lies in the
//! feasible set.

mod curve;
pub(crate) use curve::mean_stderr;
mod network;

pub use curve::{generalization_curve, CurveRow, CurveSpec, GeneralizationCurve};
pub use network::{
    perceptron_fit, perceptron_fit_vectors, two_layer_fit, two_layer_fit_vectors, Activation,
    PerceptronModel, TwoLayerFit, TwoLayerInit, TwoLayerModel,
};

use serde::{Deserialize, Serialize};

use crate::ensembles::TrainingSet;
use crate::error::{Error, Result};
use crate::matrix::{hs_inner, project_to_effect, project_to_state};
use crate::{Effect, HermitianMatrix, State};

/// Per-sample loss.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    #[default]
    Square,
    Absolute,
}

impl Loss {
    pub fn value(&self, prediction: f64, label: f64) -> f64 {
        let r = prediction - label;
        match self {
            Loss::Square => r * r,
            Loss::Absolute => r.abs(),
        }
    }

    /// Derivative (a subgradient for `Absolute`) with respect to the prediction.
    pub fn derivative(&self, prediction: f64, label: f64) -> f64 {
        let r = prediction - label;
        match self {
            Loss::Square => 2.0 * r,
            Loss::Absolute => {
                if r > 0.0 {
                    1.0
                } else if r < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Gradient descent settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    /// Fixed step; `None` selects `1/(2 · maxᵢ ‖xᵢ‖₂²)`.
    pub learning_rate: Option<f64>,
    pub max_iters: usize,
    pub grad_tolerance: f64,
    pub loss: Loss,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            learning_rate: None,
            max_iters: 100_000,
            grad_tolerance: 1e-8,
            loss: Loss::Square,
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(lr) = self.learning_rate {
            if !(lr > 0.0) || !lr.is_finite() {
                return Err(Error::InvalidParameter(format!("learning rate {lr}")));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be positive".into()));
        }
        if !(self.grad_tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gradient tolerance {}",
                self.grad_tolerance
            )));
        }
        Ok(())
    }
}

/// Result of an ERM run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitReport {
    pub estimate: HermitianMatrix,
    pub empirical_risk: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Empirical risk of the initial point followed by every iterate.
    pub risk_trace: Vec<f64>,
}

impl FitReport {
    pub fn to_json(&self) -> Result<String> {
        crate::wire::to_json(self)
    }
}

/// Empirical risk `(1/n) Σ ℓ(Tr(X xᵢ), yᵢ)`.
pub fn empirical_risk(x: &HermitianMatrix, data: &TrainingSet, loss: Loss) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut s = 0.0;
    for (xi, &y) in data.inputs.iter().zip(&data.labels) {
        s += loss.value(hs_inner(x, xi)?, y);
    }
    Ok(s / data.len() as f64)
}

/// Gradient of the empirical risk, `(1/n) Σ ℓ'(Tr(X xᵢ), yᵢ) xᵢ`.
pub fn risk_gradient(x: &HermitianMatrix, data: &TrainingSet, loss: Loss) -> Result<HermitianMatrix> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut g = HermitianMatrix::zeros(x.dim());
    let inv_n = 1.0 / data.len() as f64;
    for (xi, &y) in data.inputs.iter().zip(&data.labels) {
        let c = loss.derivative(hs_inner(x, xi)?, y) * inv_n;
        if c != 0.0 {
            g.axpy(c, xi)?;
        }
    }
    Ok(g)
}

fn default_step(data: &TrainingSet) -> f64 {
    let max_sq = data
        .inputs
        .iter()
        .map(|x| {
            let f = x.frobenius_norm();
            f * f
        })
        .fold(0.0, f64::max);
    if max_sq > 0.0 {
        1.0 / (2.0 * max_sq)
    } else {
        1.0
    }
}

fn check_data(data: &TrainingSet) -> Result<()> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    if data.inputs.len() != data.labels.len() {
        return Err(Error::DimensionMismatch {
            expected: data.inputs.len(),
            found: data.labels.len(),
        });
    }
    for x in &data.inputs {
        if x.dim() != data.dim {
            return Err(Error::DimensionMismatch {
                expected: data.dim,
                found: x.dim(),
            });
        }
    }
    Ok(())
}

fn projected_gradient_descent(
    data: &TrainingSet,
    cfg: &LearnerConfig,
    init: HermitianMatrix,
    project: impl Fn(&HermitianMatrix) -> Result<HermitianMatrix>,
) -> Result<FitReport> {
    cfg.validate()?;
    let eta = cfg.learning_rate.unwrap_or_else(|| default_step(data));
    let mut x = init;
    let mut risk = empirical_risk(&x, data, cfg.loss)?;
    let mut trace = vec![risk];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        let g = risk_gradient(&x, data, cfg.loss)?;
        let next = project(&x.add_scaled(-eta, &g)?)?;
        let step = next.distance(&x)? / eta;
        iterations += 1;
        x = next;
        risk = empirical_risk(&x, data, cfg.loss)?;
        trace.push(risk);
        if step <= cfg.grad_tolerance {
            converged = true;
            break;
        }
    }
    Ok(FitReport {
        estimate: x,
        empirical_risk: risk,
        iterations,
        converged,
        risk_trace: trace,
    })
}

/// ERM over all effects: learns an unknown two-outcome measurement from
/// `(state, label)` pairs. Starts at `I/2`.
pub fn erm_effect(data: &TrainingSet, cfg: &LearnerConfig) -> Result<FitReport> {
    check_data(data)?;
    for (i, x) in data.inputs.iter().enumerate() {
        if State::new(x.clone()).is_err() {
            return Err(Error::InvalidInput {
                index: i,
                expected: "state",
            });
        }
    }
    let init = HermitianMatrix::identity(data.dim).scale(0.5);
    projected_gradient_descent(data, cfg, init, |m| {
        project_to_effect(m).map(Effect::into_matrix)
    })
}

/// ERM over all states: learns an unknown state from `(effect, label)` pairs.
/// Starts at `I/d`.
pub fn erm_state(data: &TrainingSet, cfg: &LearnerConfig) -> Result<FitReport> {
    check_data(data)?;
    for (i, x) in data.inputs.iter().enumerate() {
        if Effect::new(x.clone()).is_err() {
            return Err(Error::InvalidInput {
                index: i,
                expected: "effect",
            });
        }
    }
    let init = State::maximally_mixed(data.dim).into_matrix();
    projected_gradient_descent(data, cfg, init, |m| {
        project_to_state(m).map(State::into_matrix)
    })
}

/// Whether a risk trace is non-increasing up to `slack`.
pub fn is_monotone(trace: &[f64], slack: f64) -> bool {
    trace.windows(2).all(|w| w[1] <= w[0] + slack)
}

/// Binary labels check used by the classifiers.
pub(crate) fn check_binary(labels: &[f64]) -> Result<()> {
    for (i, &y) in labels.iter().enumerate() {
        if y != 0.0 && y != 1.0 {
            return Err(Error::NonBinaryLabel { index: i, value: y });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::LabelRegime;

    #[test]
    fn single_pure_state_is_fit_exactly() {
        let rho = State::basis(3, 1).into_matrix();
        let data = TrainingSet::from_parts(vec![rho], vec![1.0], LabelRegime::Exact).unwrap();
        let fit = erm_effect(&data, &LearnerConfig::default()).unwrap();
        assert!(fit.converged);
        assert!(fit.empirical_risk < 1e-16);
    }

    #[test]
    fn identity_effect_fixes_any_state() {
        let data = TrainingSet::from_parts(
            vec![HermitianMatrix::identity(2)],
            vec![1.0],
            LabelRegime::Exact,
        )
        .unwrap();
        let fit = erm_state(&data, &LearnerConfig::default()).unwrap();
        assert_eq!(fit.empirical_risk, 0.0);
        assert_eq!(fit.iterations, 1);
    }

    #[test]
    fn rejects_non_state_inputs() {
        let data = TrainingSet::from_parts(
            vec![HermitianMatrix::identity(2)],
            vec![1.0],
            LabelRegime::Exact,
        )
        .unwrap();
        assert!(matches!(
            erm_effect(&data, &LearnerConfig::default()),
            Err(Error::InvalidInput { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let cfg = LearnerConfig {
            learning_rate: Some(-1.0),
            ..LearnerConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn absolute_loss_subgradient() {
        assert_eq!(Loss::Absolute.derivative(0.3, 0.3), 0.0);
        assert_eq!(Loss::Absolute.derivative(0.5, 0.3), 1.0);
        assert_eq!(Loss::Square.value(0.5, 0.25), 0.0625);
    }
}
