//! Perceptron and single-hidden-layer network on Bloch-vector inputs.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_binary, LearnerConfig};
use crate::bloch::bloch_coordinates;
use crate::ensembles::{standard_normal, RngSeed, TrainingSet};
use crate::error::{Error, Result};

/// Output nonlinearity `σ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Identity,
    /// Threshold unit: `1` if `z ≥ 0`, else `0`.
    #[default]
    Sign,
    /// `z` clamped to `[0, 1]`.
    ClampedLinear,
}

impl Activation {
    pub fn apply(&self, z: f64) -> f64 {
        match self {
            Activation::Identity => z,
            Activation::Sign => {
                if z >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::ClampedLinear => z.clamp(0.0, 1.0),
        }
    }

    fn derivative(&self, z: f64) -> Option<f64> {
        match self {
            Activation::Identity => Some(1.0),
            Activation::Sign => None,
            Activation::ClampedLinear => Some(if z > 0.0 && z < 1.0 { 1.0 } else { 0.0 }),
        }
    }
}

/// `f(r) = σ(v·r + v₀)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerceptronModel {
    pub v0: f64,
    pub v: Vec<f64>,
    pub activation: Activation,
    /// Misclassified samples in each completed epoch.
    pub epoch_errors: Vec<usize>,
}

impl PerceptronModel {
    pub fn zeros(len: usize, activation: Activation) -> Self {
        Self {
            v0: 0.0,
            v: vec![0.0; len],
            activation,
            epoch_errors: Vec::new(),
        }
    }

    pub fn eval(&self, r: &[f64]) -> f64 {
        self.activation.apply(dot(&self.v, r) + self.v0)
    }

    pub fn training_errors(&self, points: &[Vec<f64>], labels: &[f64]) -> usize {
        points
            .iter()
            .zip(labels)
            .filter(|(r, &y)| self.eval(r) != y)
            .count()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn bloch_inputs(data: &TrainingSet) -> Result<Vec<Vec<f64>>> {
    data.inputs
        .iter()
        .map(|x| bloch_coordinates(x).map(|b| b.r))
        .collect()
}

/// Perceptron learning on the Bloch vectors of a binary-labelled set.
///
/// Each sample with `f(r) ≠ y` adds `η (y − f(r)) [r, 1]` to `[v, v₀]`.
/// Stops after the first epoch without errors or after `epochs` epochs.
pub fn perceptron_fit(
    data: &TrainingSet,
    eta: f64,
    epochs: usize,
    init: Option<PerceptronModel>,
) -> Result<PerceptronModel> {
    let points = bloch_inputs(data)?;
    perceptron_fit_vectors(&points, &data.labels, eta, epochs, init)
}

pub fn perceptron_fit_vectors(
    points: &[Vec<f64>],
    labels: &[f64],
    eta: f64,
    epochs: usize,
    init: Option<PerceptronModel>,
) -> Result<PerceptronModel> {
    if points.is_empty() {
        return Err(Error::EmptyData);
    }
    if points.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            found: labels.len(),
        });
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter(format!("step {eta}")));
    }
    check_binary(labels)?;
    let len = points[0].len();
    let mut model = init.unwrap_or_else(|| PerceptronModel::zeros(len, Activation::Sign));
    if model.v.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            found: model.v.len(),
        });
    }
    model.epoch_errors.clear();
    for _ in 0..epochs {
        let mut errors = 0;
        for (r, &y) in points.iter().zip(labels) {
            let f = model.eval(r);
            if f != y {
                errors += 1;
                let c = eta * (y - f);
                for (w, x) in model.v.iter_mut().zip(r) {
                    *w += c * x;
                }
                model.v0 += c;
            }
        }
        model.epoch_errors.push(errors);
        if errors == 0 {
            break;
        }
    }
    Ok(model)
}

/// `f(r) = Σᵢ wᵢ σ(vᵢ·r + v₀ᵢ) + w₀`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLayerModel {
    /// Input weights `(v₀ᵢ, vᵢ)` of each hidden unit.
    pub hidden: Vec<(f64, Vec<f64>)>,
    /// Output weights; `w[0]` is the bias `w₀`.
    pub w: Vec<f64>,
    pub activation: Activation,
}

impl TwoLayerModel {
    pub fn eval(&self, r: &[f64]) -> f64 {
        self.w[0]
            + self
                .hidden
                .iter()
                .zip(&self.w[1..])
                .map(|((v0, v), w)| w * self.activation.apply(dot(v, r) + v0))
                .sum::<f64>()
    }

    pub fn risk(&self, points: &[Vec<f64>], labels: &[f64]) -> f64 {
        points
            .iter()
            .zip(labels)
            .map(|(r, y)| {
                let e = self.eval(r) - y;
                e * e
            })
            .sum::<f64>()
            / points.len() as f64
    }

    fn params(&self) -> Vec<f64> {
        let mut p = self.w.clone();
        for (v0, v) in &self.hidden {
            p.push(*v0);
            p.extend_from_slice(v);
        }
        p
    }

    fn set_params(&mut self, p: &[f64]) {
        let k = self.hidden.len();
        self.w.copy_from_slice(&p[..=k]);
        let mut at = k + 1;
        for (v0, v) in self.hidden.iter_mut() {
            let len = v.len();
            *v0 = p[at];
            v.copy_from_slice(&p[at + 1..at + 1 + len]);
            at += 1 + len;
        }
    }

    fn gradient(&self, points: &[Vec<f64>], labels: &[f64]) -> Result<Vec<f64>> {
        let k = self.hidden.len();
        let len = self.hidden[0].1.len();
        let mut g = vec![0.0; (k + 1) + k * (len + 1)];
        let inv_n = 1.0 / points.len() as f64;
        for (r, &y) in points.iter().zip(labels) {
            let e = 2.0 * (self.eval(r) - y) * inv_n;
            g[0] += e;
            let mut at = k + 1;
            for (i, (v0, v)) in self.hidden.iter().enumerate() {
                let z = dot(v, r) + v0;
                let s = self.activation.apply(z);
                let ds = self.activation.derivative(z).ok_or_else(|| {
                    Error::InvalidParameter("activation has no gradient".into())
                })?;
                g[i + 1] += e * s;
                let c = e * self.w[i + 1] * ds;
                g[at] += c;
                for (gj, x) in g[at + 1..at + 1 + len].iter_mut().zip(r) {
                    *gj += c * x;
                }
                at += 1 + len;
            }
        }
        Ok(g)
    }
}

/// Initial weights for [`two_layer_fit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoLayerInit {
    Zeros,
    /// Small Gaussian weights from the given stream.
    Seeded(RngSeed),
}

/// Outcome of [`two_layer_fit`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwoLayerFit {
    pub model: TwoLayerModel,
    pub risk_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Full-batch gradient descent on the square loss with backtracking, so the
/// risk never increases.
pub fn two_layer_fit(
    data: &TrainingSet,
    k: usize,
    activation: Activation,
    cfg: &LearnerConfig,
    init: TwoLayerInit,
) -> Result<TwoLayerFit> {
    let points = bloch_inputs(data)?;
    two_layer_fit_vectors(&points, &data.labels, k, activation, cfg, init)
}

pub fn two_layer_fit_vectors(
    points: &[Vec<f64>],
    labels: &[f64],
    k: usize,
    activation: Activation,
    cfg: &LearnerConfig,
    init: TwoLayerInit,
) -> Result<TwoLayerFit> {
    cfg.validate()?;
    if k == 0 {
        return Err(Error::InvalidParameter("at least one hidden unit".into()));
    }
    if points.is_empty() {
        return Err(Error::EmptyData);
    }
    if points.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            found: labels.len(),
        });
    }
    if activation == Activation::Sign {
        return Err(Error::InvalidParameter(
            "sign activation cannot be trained by gradient descent".into(),
        ));
    }
    let len = points[0].len();
    let mut model = TwoLayerModel {
        hidden: vec![(0.0, vec![0.0; len]); k],
        w: vec![0.0; k + 1],
        activation,
    };
    if let TwoLayerInit::Seeded(seed) = init {
        let mut rng = seed.rng();
        let scale = 0.5 / ((len + 1) as f64).sqrt();
        let mut p = model.params();
        for x in p.iter_mut() {
            *x = scale * standard_normal(&mut rng);
        }
        // start hidden biases inside the linear region of clamped units
        if activation == Activation::ClampedLinear {
            let mut at = k + 1;
            for _ in 0..k {
                p[at] = 0.5 + 0.1 * rng.gen::<f64>();
                at += 1 + len;
            }
        }
        model.set_params(&p);
    }

    let mut risk = model.risk(points, labels);
    let mut trace = vec![risk];
    let mut step = cfg.learning_rate.unwrap_or(1.0);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        let g = model.gradient(points, labels)?;
        let gnorm_sq: f64 = g.iter().map(|x| x * x).sum();
        if gnorm_sq.sqrt() <= cfg.grad_tolerance {
            converged = true;
            break;
        }
        let p = model.params();
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = p.iter().zip(&g).map(|(x, d)| x - step * d).collect();
            let mut candidate = model.clone();
            candidate.set_params(&trial);
            let r = candidate.risk(points, labels);
            if r <= risk - 0.5 * step * gnorm_sq {
                model = candidate;
                risk = r;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        trace.push(risk);
        if !accepted {
            // no descent possible at machine precision
            converged = true;
            break;
        }
        step = (step * 2.0).min(1e3);
    }
    Ok(TwoLayerFit {
        model,
        risk_trace: trace,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_activation_step() {
        assert_eq!(Activation::Sign.apply(0.0), 1.0);
        assert_eq!(Activation::Sign.apply(-1e-12), 0.0);
        assert_eq!(Activation::ClampedLinear.apply(1.5), 1.0);
    }

    #[test]
    fn perceptron_no_updates_when_already_correct() {
        let pts = vec![vec![0.1, 0.2, 0.3], vec![-0.4, 0.0, 0.2]];
        let m = perceptron_fit_vectors(&pts, &[1.0, 1.0], 0.1, 10, None).unwrap();
        assert_eq!(m.epoch_errors, vec![0]);
        assert_eq!(m.v, vec![0.0; 3]);
    }

    #[test]
    fn perceptron_rejects_real_labels() {
        let pts = vec![vec![0.0; 3]];
        assert!(matches!(
            perceptron_fit_vectors(&pts, &[0.5], 0.1, 1, None),
            Err(Error::NonBinaryLabel { .. })
        ));
    }

    #[test]
    fn zero_target_zero_model() {
        let pts = vec![vec![0.3, -0.1, 0.2], vec![0.0, 0.5, -0.5]];
        let fit = two_layer_fit_vectors(
            &pts,
            &[0.0, 0.0],
            2,
            Activation::Identity,
            &LearnerConfig::default(),
            TwoLayerInit::Zeros,
        )
        .unwrap();
        assert_eq!(fit.model.risk(&pts, &[0.0, 0.0]), 0.0);
        assert!(fit.converged);
    }
}
