//! Random states, effects and unitaries, and labelled training sets.
//!
//! Every sampler takes an explicit generator; [`RngSeed`] turns a
//! `(seed, stream_id)` pair into an independent ChaCha stream so that
//! parallel trials are reproducible regardless of scheduling.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{hs_inner, project_to_effect, ComplexMatrix};
use crate::scalar::tolerance;
use crate::{Effect, HermitianMatrix, State};

/// Reproducible random stream identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream_id: 0 }
    }

    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// A derived stream for sub-task `index` (trial, subset, grid point).
    pub fn child(&self, index: u64) -> Self {
        Self {
            seed: self.seed,
            stream_id: splitmix64(splitmix64(self.stream_id) ^ index),
        }
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Two independent standard normals by Box–Muller.
pub fn gaussian_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    // 1 - u lies in (0, 1], keeping the logarithm finite
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = std::f64::consts::TAU * u2;
    (r * t.cos(), r * t.sin())
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    gaussian_pair(rng).0
}

/// Complex Gaussian with independent standard normal parts.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex<f64> {
    let (a, b) = gaussian_pair(rng);
    Complex::new(a, b)
}

fn gaussian_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Complex<f64>> {
    (0..d).map(|_| complex_gaussian(rng)).collect()
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

/// Rank-one projector onto a normalized complex Gaussian vector.
pub fn haar_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<State> {
    check_dim(d)?;
    loop {
        let psi = gaussian_vector(d, rng);
        if psi.iter().any(|z| z.norm_sqr() > 0.0) {
            return Ok(State::new_unchecked(HermitianMatrix::pure_state(&psi)?));
        }
    }
}

/// `GG†/Tr(GG†)` with `G` a `d × rank` complex Gaussian matrix.
pub fn ginibre_mixed_state<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Result<State> {
    check_dim(d)?;
    if rank == 0 || rank > d {
        return Err(Error::InvalidRank { rank, dim: d });
    }
    let g: Vec<Complex<f64>> = (0..d * rank).map(|_| complex_gaussian(rng)).collect();
    let mut data = vec![Complex::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            let mut s = Complex::new(0.0, 0.0);
            for k in 0..rank {
                s += g[i * rank + k] * g[j * rank + k].conj();
            }
            data[i * d + j] = s;
        }
    }
    let m = HermitianMatrix::new(d, data)?;
    let tr = m.trace();
    Ok(State::new_unchecked(m.scale(1.0 / tr)))
}

/// Haar-random unitary via Gram–Schmidt on a complex Gaussian matrix.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexMatrix<f64>> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let mut cols: Vec<Vec<Complex<f64>>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v = gaussian_vector(d, rng);
        // two passes of modified Gram–Schmidt for numerical orthogonality
        for _ in 0..2 {
            for c in &cols {
                let proj: Complex<f64> = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_columns(&cols)
}

/// Sampling modes for [`random_effect`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EffectMode {
    /// Random Hermitian centred at `I/2`, eigenvalues clipped to `[0, 1]`.
    EigenClip,
    /// Projector onto a Haar-random `k`-dimensional subspace.
    HaarProjector(usize),
    /// Random convex combination of Haar projectors of every rank `0..=d`.
    RankMixture,
}

pub fn random_effect<R: Rng + ?Sized>(d: usize, mode: EffectMode, rng: &mut R) -> Result<Effect> {
    check_dim(d)?;
    match mode {
        EffectMode::EigenClip => {
            let scale = 1.0 / (2.0 * (2.0 * d as f64).sqrt());
            let mut data = vec![Complex::new(0.0, 0.0); d * d];
            for i in 0..d {
                data[i * d + i] = Complex::new(0.5 + 2.0 * scale * standard_normal(rng), 0.0);
                for j in (i + 1)..d {
                    let z = complex_gaussian(rng) * scale;
                    data[i * d + j] = z;
                    data[j * d + i] = z.conj();
                }
            }
            project_to_effect(&HermitianMatrix::new(d, data)?)
        }
        EffectMode::HaarProjector(k) => haar_projector(d, k, rng).map(Effect::new_unchecked),
        EffectMode::RankMixture => {
            let weights = dirichlet_ones(d + 1, rng);
            let mut acc = HermitianMatrix::zeros(d);
            for (k, w) in weights.into_iter().enumerate() {
                acc.axpy(w, &haar_projector(d, k, rng)?)?;
            }
            Ok(Effect::new_unchecked(acc))
        }
    }
}

fn haar_projector<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Result<HermitianMatrix> {
    if k > d {
        return Err(Error::InvalidRank { rank: k, dim: d });
    }
    if k == 0 {
        return Ok(HermitianMatrix::zeros(d));
    }
    if k == d {
        return Ok(HermitianMatrix::identity(d));
    }
    let u = haar_unitary(d, rng)?;
    let mut acc = HermitianMatrix::zeros(d);
    for j in 0..k {
        acc.axpy(1.0, &HermitianMatrix::outer(&u.column(j)))?;
    }
    Ok(acc)
}

/// Uniform point on the probability simplex with `n` vertices.
pub fn dirichlet_ones<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// The computational-basis projectors `|0⟩⟨0|, …, |d−1⟩⟨d−1|`.
pub fn orthonormal_state_family(d: usize) -> Result<Vec<State>> {
    check_dim(d)?;
    Ok((0..d).map(|k| State::basis(d, k)).collect())
}

/// The computational basis rotated by a Haar unitary.
pub fn rotated_orthonormal_family<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Vec<State>> {
    check_dim(d)?;
    let u = haar_unitary(d, rng)?;
    Ok((0..d)
        .map(|k| State::new_unchecked(HermitianMatrix::outer(&u.column(k))))
        .collect())
}

/// Named input ensembles for experiments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateEnsemble {
    /// Haar-random pure states.
    HaarPure,
    /// Ginibre mixed states of the given rank.
    Ginibre { rank: usize },
    /// The computational basis repeated until `n` states are drawn.
    CycledBasis,
    /// A Haar-rotated orthonormal basis, repeated cyclically.
    RotatedBasis,
    /// Every input equal to `I/d`.
    MaximallyMixed,
}

impl StateEnsemble {
    pub fn name(&self) -> String {
        match self {
            StateEnsemble::HaarPure => "haar".into(),
            StateEnsemble::Ginibre { rank } => format!("ginibre{rank}"),
            StateEnsemble::CycledBasis => "cycled".into(),
            StateEnsemble::RotatedBasis => "rotated".into(),
            StateEnsemble::MaximallyMixed => "mixed".into(),
        }
    }

    /// Draws `n` states of dimension `d`.
    pub fn sample<R: Rng + ?Sized>(&self, d: usize, n: usize, rng: &mut R) -> Result<Vec<State>> {
        check_dim(d)?;
        match *self {
            StateEnsemble::HaarPure => (0..n).map(|_| haar_pure_state(d, rng)).collect(),
            StateEnsemble::Ginibre { rank } => {
                (0..n).map(|_| ginibre_mixed_state(d, rank, rng)).collect()
            }
            StateEnsemble::CycledBasis => Ok((0..n).map(|i| State::basis(d, i % d)).collect()),
            StateEnsemble::RotatedBasis => {
                let family = rotated_orthonormal_family(d, rng)?;
                Ok((0..n).map(|i| family[i % d].clone()).collect())
            }
            StateEnsemble::MaximallyMixed => Ok(vec![State::maximally_mixed(d); n]),
        }
    }
}

/// How labels are produced from the target functional.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LabelRegime {
    /// `y = Tr(target · x)`.
    Exact,
    /// `y ~ Bernoulli(Tr(target · x))`.
    Bernoulli,
    /// `y = Tr(target · x) + N(0, σ²)`.
    NoisyGaussian { sigma: f64 },
}

/// Labelled samples `(xᵢ, yᵢ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingSet {
    pub dim: usize,
    pub inputs: Vec<HermitianMatrix>,
    pub labels: Vec<f64>,
    pub regime: LabelRegime,
    pub seed: Option<RngSeed>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<HermitianMatrix>,
}

impl TrainingSet {
    /// A training set from explicit data.
    pub fn from_parts(
        inputs: Vec<HermitianMatrix>,
        labels: Vec<f64>,
        regime: LabelRegime,
    ) -> Result<Self> {
        let dim = inputs.first().ok_or(Error::EmptyData)?.dim();
        if inputs.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                found: labels.len(),
            });
        }
        for x in &inputs {
            if x.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: x.dim(),
                });
            }
        }
        Ok(Self {
            dim,
            inputs,
            labels,
            regime,
            seed: None,
            target: None,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        crate::wire::to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(text)?;
        if t.inputs.len() != t.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: t.inputs.len(),
                found: t.labels.len(),
            });
        }
        Ok(t)
    }
}

/// Labels `inputs` with `target` under the given regime.
pub fn make_training_set(
    target: &HermitianMatrix,
    inputs: Vec<HermitianMatrix>,
    regime: LabelRegime,
    seed: RngSeed,
) -> Result<TrainingSet> {
    if let LabelRegime::NoisyGaussian { sigma } = regime {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("noise sigma {sigma}")));
        }
    }
    let mut rng = seed.rng();
    let mut labels = Vec::with_capacity(inputs.len());
    for (i, x) in inputs.iter().enumerate() {
        let p = hs_inner(target, x)?;
        let y = match regime {
            LabelRegime::Exact => p,
            LabelRegime::NoisyGaussian { sigma } => p + sigma * standard_normal(&mut rng),
            LabelRegime::Bernoulli => {
                let slack = tolerance::PROBABILITY;
                if !(-slack..=1.0 + slack).contains(&p) {
                    return Err(Error::ProbabilityOutOfRange { index: i, value: p });
                }
                let p = p.clamp(0.0, 1.0);
                if rng.gen::<f64>() < p {
                    1.0
                } else {
                    0.0
                }
            }
        };
        labels.push(y);
    }
    let mut set = TrainingSet::from_parts(inputs, labels, regime)?;
    if set.dim != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            found: set.dim,
        });
    }
    set.seed = Some(seed);
    set.target = Some(target.clone());
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_reproducible() {
        let a = haar_pure_state(3, &mut RngSeed::new(7).rng()).unwrap();
        let b = haar_pure_state(3, &mut RngSeed::new(7).rng()).unwrap();
        assert_eq!(a, b);
        let c = haar_pure_state(3, &mut RngSeed::with_stream(7, 1).rng()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn child_streams_differ() {
        let s = RngSeed::new(1);
        assert_ne!(s.child(0), s.child(1));
        assert_eq!(s.child(5), s.child(5));
    }

    #[test]
    fn extreme_projectors() {
        let mut rng = RngSeed::new(3).rng();
        let z = random_effect(3, EffectMode::HaarProjector(0), &mut rng).unwrap();
        assert_eq!(z.trace(), 0.0);
        let i = random_effect(3, EffectMode::HaarProjector(3), &mut rng).unwrap();
        assert_eq!(i.matrix(), &HermitianMatrix::identity(3));
        assert!(random_effect(3, EffectMode::HaarProjector(4), &mut rng).is_err());
    }

    #[test]
    fn ginibre_rank_checks() {
        let mut rng = RngSeed::new(3).rng();
        assert!(ginibre_mixed_state(3, 0, &mut rng).is_err());
        assert!(ginibre_mixed_state(3, 4, &mut rng).is_err());
        let s = ginibre_mixed_state(3, 3, &mut rng).unwrap();
        assert!((s.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bernoulli_rejects_bad_probability() {
        let target = HermitianMatrix::from_real_diagonal(&[2.0, 0.0]);
        let err = make_training_set(
            &target,
            vec![State::basis(2, 0).into_matrix()],
            LabelRegime::Bernoulli,
            RngSeed::new(0),
        );
        assert!(matches!(err, Err(Error::ProbabilityOutOfRange { .. })));
    }

    #[test]
    fn training_set_json_round_trip() {
        let target = HermitianMatrix::from_real_diagonal(&[0.75, 0.25]);
        let inputs = vec![State::basis(2, 0).into_matrix(), State::basis(2, 1).into_matrix()];
        let set = make_training_set(&target, inputs, LabelRegime::Exact, RngSeed::new(9)).unwrap();
        let text = set.to_json().unwrap();
        for key in ["\"dim\"", "\"inputs\"", "\"labels\"", "\"regime\"", "\"seed\""] {
            assert!(text.contains(key), "{key} missing");
        }
        assert_eq!(TrainingSet::from_json(&text).unwrap(), set);
    }
}
