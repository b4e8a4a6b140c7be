//! Generalized Bloch representation of states and effect functionals.
//!
//! Generators are the generalized Gell-Mann matrices normalized to
//! `Tr(ΛᵢΛⱼ) = 2δᵢⱼ`, ordered as all symmetric pairs, then all antisymmetric
//! pairs, then the diagonal matrices. For `d = 2` this is `X, Y, Z`.
//!
//! With `c_d = √(d(d−1)/2)` a state is `ρ = (1/d)(I + c_d Σ rᵢΛᵢ)` and
//! `rᵢ = √(d/(2(d−1))) Tr(ρΛᵢ)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{HermitianMatrix, State};
use crate::scalar::{tolerance, Real};

/// Position of a generator inside the Gell-Mann family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    /// `E_jk + E_kj`
    Symmetric(usize, usize),
    /// `−iE_jk + iE_kj`
    Antisymmetric(usize, usize),
    /// `√(2/(l(l+1))) diag(1, …, 1, −l, 0, …)` with `l` leading ones
    Diagonal(usize),
}

/// Generator ordering for dimension `d`.
pub fn generator_kinds(d: usize) -> Vec<GeneratorKind> {
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            out.push(GeneratorKind::Symmetric(j, k));
        }
    }
    for j in 0..d {
        for k in (j + 1)..d {
            out.push(GeneratorKind::Antisymmetric(j, k));
        }
    }
    for l in 1..d {
        out.push(GeneratorKind::Diagonal(l));
    }
    out
}

/// `c_d = √(d(d−1)/2)`.
pub fn c_d<T: Real>(d: usize) -> T {
    let d = T::from_usize_lossy(d);
    (d * (d - T::one()) / T::lit(2.0)).sqrt()
}

/// `√(d/(2(d−1)))`, the factor between `Tr(ρΛᵢ)` and `rᵢ`.
fn coordinate_scale<T: Real>(d: usize) -> T {
    let d = T::from_usize_lossy(d);
    (d / (T::lit(2.0) * (d - T::one()))).sqrt()
}

/// Factor relating Hilbert–Schmidt distance of states to Euclidean distance
/// of their Bloch vectors: `‖ρ₁ − ρ₂‖₂ = √((d−1)/d) ‖r₁ − r₂‖₂`.
pub fn hs_distance_factor<T: Real>(d: usize) -> T {
    let d = T::from_usize_lossy(d);
    ((d - T::one()) / d).sqrt()
}

/// The `d² − 1` generators of `su(d)` for a fixed dimension.
#[derive(Clone, Debug)]
pub struct GeneratorBasis<T: Real> {
    dim: usize,
    kinds: Vec<GeneratorKind>,
    generators: Vec<HermitianMatrix<T>>,
}

pub fn generator_basis<T: Real>(d: usize) -> Result<GeneratorBasis<T>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let kinds = generator_kinds(d);
    let zero = Complex::new(T::zero(), T::zero());
    let generators = kinds
        .iter()
        .map(|kind| {
            let mut data = vec![zero; d * d];
            match *kind {
                GeneratorKind::Symmetric(j, k) => {
                    data[j * d + k] = Complex::new(T::one(), T::zero());
                    data[k * d + j] = Complex::new(T::one(), T::zero());
                }
                GeneratorKind::Antisymmetric(j, k) => {
                    data[j * d + k] = Complex::new(T::zero(), -T::one());
                    data[k * d + j] = Complex::new(T::zero(), T::one());
                }
                GeneratorKind::Diagonal(l) => {
                    let s = diagonal_scale::<T>(l);
                    for m in 0..l {
                        data[m * d + m] = Complex::new(s, T::zero());
                    }
                    data[l * d + l] = Complex::new(-s * T::from_usize_lossy(l), T::zero());
                }
            }
            HermitianMatrix::from_raw(d, data)
        })
        .collect();
    Ok(GeneratorBasis {
        dim: d,
        kinds,
        generators,
    })
}

fn diagonal_scale<T: Real>(l: usize) -> T {
    let l = T::from_usize_lossy(l);
    (T::lit(2.0) / (l * (l + T::one()))).sqrt()
}

impl<T: Real> GeneratorBasis<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[HermitianMatrix<T>] {
        &self.generators
    }

    pub fn kinds(&self) -> &[GeneratorKind] {
        &self.kinds
    }

    /// `(Tr M, [Tr(MΛᵢ)])`, so that `M = (Tr M / d) I + ½ Σ Tr(MΛᵢ) Λᵢ`.
    pub fn decompose(&self, m: &HermitianMatrix<T>) -> Result<(T, Vec<T>)> {
        check_dim(self.dim, m.dim())?;
        Ok((m.trace(), generator_traces(m)))
    }

    /// `a I + Σ cᵢ Λᵢ`.
    pub fn combine(&self, identity_coeff: T, coeffs: &[T]) -> Result<HermitianMatrix<T>> {
        check_dim(self.len(), coeffs.len())?;
        Ok(combine_generators(self.dim, identity_coeff, coeffs))
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `[Tr(MΛᵢ)]` in generator order, read directly off the entries.
pub fn generator_traces<T: Real>(m: &HermitianMatrix<T>) -> Vec<T> {
    let d = m.dim();
    generator_kinds(d)
        .into_iter()
        .map(|kind| match kind {
            GeneratorKind::Symmetric(j, k) => T::lit(2.0) * m.get(j, k).re,
            GeneratorKind::Antisymmetric(j, k) => -T::lit(2.0) * m.get(j, k).im,
            GeneratorKind::Diagonal(l) => {
                let head: T = (0..l).map(|i| m.get(i, i).re).sum();
                diagonal_scale::<T>(l) * (head - T::from_usize_lossy(l) * m.get(l, l).re)
            }
        })
        .collect()
}

/// `a I + Σ cᵢ Λᵢ` built entrywise.
pub fn combine_generators<T: Real>(d: usize, identity_coeff: T, coeffs: &[T]) -> HermitianMatrix<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut data = vec![zero; d * d];
    for i in 0..d {
        data[i * d + i].re = identity_coeff;
    }
    for (kind, &c) in generator_kinds(d).iter().zip(coeffs) {
        match *kind {
            GeneratorKind::Symmetric(j, k) => {
                data[j * d + k].re += c;
                data[k * d + j].re += c;
            }
            GeneratorKind::Antisymmetric(j, k) => {
                data[j * d + k].im -= c;
                data[k * d + j].im += c;
            }
            GeneratorKind::Diagonal(l) => {
                let s = diagonal_scale::<T>(l) * c;
                for m in 0..l {
                    data[m * d + m].re += s;
                }
                data[l * d + l].re -= s * T::from_usize_lossy(l);
            }
        }
    }
    HermitianMatrix::from_raw(d, data)
}

/// Real coordinate vector of length `d² − 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector<T: Real> {
    pub dim: usize,
    pub r: Vec<T>,
}

impl<T: Real> BlochVector<T> {
    pub fn new(dim: usize, r: Vec<T>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        check_dim(dim * dim - 1, r.len())?;
        Ok(Self { dim, r })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            r: vec![T::zero(); dim * dim - 1],
        }
    }

    pub fn norm(&self) -> T {
        self.r.iter().map(|x| *x * *x).sum::<T>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> Result<T> {
        check_dim(self.r.len(), other.r.len())?;
        Ok(self.r.iter().zip(&other.r).map(|(a, b)| *a * *b).sum())
    }
}

/// Bloch coordinates of any Hermitian matrix, `√(d/(2(d−1))) Tr(MΛᵢ)`.
pub fn bloch_coordinates<T: Real>(m: &HermitianMatrix<T>) -> Result<BlochVector<T>> {
    let d = m.dim();
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let s = coordinate_scale::<T>(d);
    Ok(BlochVector {
        dim: d,
        r: generator_traces(m).into_iter().map(|t| t * s).collect(),
    })
}

pub fn state_to_bloch<T: Real>(rho: &State<T>) -> Result<BlochVector<T>> {
    bloch_coordinates(rho.matrix())
}

/// A Hermitian matrix reconstructed from a Bloch vector, with a flag saying
/// whether it is a valid state.
#[derive(Clone, Debug)]
pub struct BlochReconstruction<T: Real> {
    pub matrix: HermitianMatrix<T>,
    pub is_state: bool,
}

impl<T: Real> BlochReconstruction<T> {
    pub fn into_state(self) -> Result<State<T>> {
        State::new(self.matrix)
    }
}

/// `(1/d)(I + c_d Σ rᵢΛᵢ)`. Trace one, but not necessarily positive.
pub fn bloch_to_state<T: Real>(r: &BlochVector<T>) -> Result<BlochReconstruction<T>> {
    let d = r.dim;
    check_dim(d * d - 1, r.r.len())?;
    let inv_d = T::one() / T::from_usize_lossy(d);
    let s = c_d::<T>(d) * inv_d;
    let coeffs: Vec<T> = r.r.iter().map(|x| *x * s).collect();
    let matrix = combine_generators(d, inv_d, &coeffs);
    let min = matrix.eig()?.min();
    Ok(BlochReconstruction {
        is_state: min >= -T::tol(tolerance::VERIFICATION),
        matrix,
    })
}

/// Affine functional `r ↦ (1/d)(n₀ + (d−1) r·n)` representing `Tr(Eρ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectFunctional<T: Real> {
    pub dim: usize,
    pub n0: T,
    pub n: Vec<T>,
}

impl<T: Real> EffectFunctional<T> {
    pub fn new(dim: usize, n0: T, n: Vec<T>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        check_dim(dim * dim - 1, n.len())?;
        Ok(Self { dim, n0, n })
    }

    /// Functional of a Hermitian matrix `E`: `n₀ = Tr E`, `nᵢ = √(d/(2(d−1))) Tr(EΛᵢ)`.
    pub fn from_matrix(e: &HermitianMatrix<T>) -> Result<Self> {
        let b = bloch_coordinates(e)?;
        Ok(Self {
            dim: b.dim,
            n0: e.trace(),
            n: b.r,
        })
    }

    /// `(1/d)(n₀ I + c_d Σ nᵢΛᵢ)`.
    pub fn to_matrix(&self) -> HermitianMatrix<T> {
        let inv_d = T::one() / T::from_usize_lossy(self.dim);
        let s = c_d::<T>(self.dim) * inv_d;
        let coeffs: Vec<T> = self.n.iter().map(|x| *x * s).collect();
        combine_generators(self.dim, self.n0 * inv_d, &coeffs)
    }

    pub fn eval(&self, r: &BlochVector<T>) -> Result<T> {
        functional_eval(self, r)
    }
}

pub fn functional_eval<T: Real>(f: &EffectFunctional<T>, r: &BlochVector<T>) -> Result<T> {
    check_dim(f.dim, r.dim)?;
    check_dim(f.n.len(), r.r.len())?;
    let d = T::from_usize_lossy(f.dim);
    let dot: T = f.n.iter().zip(&r.r).map(|(a, b)| *a * *b).sum();
    Ok((f.n0 + (d - T::one()) * dot) / d)
}

/// Centroid of the face spanned by `k` orthogonal pure-state Bloch vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankKCentroid<T: Real> {
    pub k: usize,
    pub n_k: Vec<T>,
}

/// Expected centroid norm `√((d−k)/(k(d−1)))` for `1 ≤ k ≤ d`.
pub fn centroid_norm<T: Real>(d: usize, k: usize) -> T {
    let (d, k) = (T::from_usize_lossy(d), T::from_usize_lossy(k));
    ((d - k) / (k * (d - T::one()))).sqrt()
}

pub fn rank_k_centroid<T: Real>(dim: usize, vectors: &[BlochVector<T>]) -> Result<RankKCentroid<T>> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let k = vectors.len();
    if k > dim {
        return Err(Error::InvalidRank { rank: k, dim });
    }
    let len = dim * dim - 1;
    let d = T::from_usize_lossy(dim);
    for (i, v) in vectors.iter().enumerate() {
        check_dim(dim, v.dim)?;
        check_dim(len, v.r.len())?;
        if (v.norm() - T::one()).abs() > T::tol(tolerance::BLOCH_NORM) {
            return Err(Error::InvalidInput {
                index: i,
                expected: "unit Bloch vector",
            });
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            // Tr(PᵢPⱼ) = (1/d)(1 + (d−1) aᵢ·aⱼ)
            let overlap = (T::one() + (d - T::one()) * vectors[i].dot(&vectors[j])?) / d;
            if overlap.abs() > T::tol(tolerance::ORTHOGONALITY) {
                return Err(Error::NonOrthogonalFamily {
                    i,
                    j,
                    overlap: overlap.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    let mut n_k = vec![T::zero(); len];
    for v in vectors {
        for (acc, x) in n_k.iter_mut().zip(&v.r) {
            *acc += *x;
        }
    }
    if k > 0 {
        let inv_k = T::one() / T::from_usize_lossy(k);
        n_k.iter_mut().for_each(|x| *x *= inv_k);
        let norm = n_k.iter().map(|x| *x * *x).sum::<T>().sqrt();
        let expected = centroid_norm::<T>(dim, k);
        if (norm - expected).abs() > T::tol(tolerance::BLOCH_NORM) {
            return Err(Error::InvalidParameter(format!(
                "centroid norm {norm} differs from {expected}"
            )));
        }
    }
    Ok(RankKCentroid { k, n_k })
}

/// Functional of the rank-`k` projector onto the span of the given pure
/// states: value `(k/d)(1 + (d−1) r·n_(k))`.
pub fn rank_k_functional<T: Real>(
    dim: usize,
    vectors: &[BlochVector<T>],
) -> Result<EffectFunctional<T>> {
    let c = rank_k_centroid(dim, vectors)?;
    let k = T::from_usize_lossy(c.k);
    Ok(EffectFunctional {
        dim,
        n0: k,
        n: c.n_k.into_iter().map(|x| x * k).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::hs_inner;

    #[test]
    fn qubit_generators_are_paulis() {
        let b = generator_basis::<f64>(2).unwrap();
        let g = b.generators();
        assert_eq!(g[0].get(0, 1), Complex::new(1.0, 0.0));
        assert_eq!(g[1].get(0, 1), Complex::new(0.0, -1.0));
        assert_eq!(g[2].diagonal(), vec![1.0, -1.0]);
    }

    #[test]
    fn rejects_dimension_one() {
        assert!(generator_basis::<f64>(1).is_err());
    }

    #[test]
    fn fast_traces_match_dense_products() {
        let m = HermitianMatrix::<f64>::new(
            3,
            vec![
                Complex::new(0.2, 0.0),
                Complex::new(0.1, 0.3),
                Complex::new(-0.4, 0.2),
                Complex::new(0.1, -0.3),
                Complex::new(0.5, 0.0),
                Complex::new(0.7, -0.1),
                Complex::new(-0.4, -0.2),
                Complex::new(0.7, 0.1),
                Complex::new(-0.6, 0.0),
            ],
        )
        .unwrap();
        let basis = generator_basis::<f64>(3).unwrap();
        let fast = generator_traces(&m);
        for (g, f) in basis.generators().iter().zip(&fast) {
            assert!((hs_inner(&m, g).unwrap() - f).abs() < 1e-14);
        }
        let (tr, coeffs) = basis.decompose(&m).unwrap();
        let half: Vec<f64> = coeffs.iter().map(|c| c / 2.0).collect();
        let back = basis.combine(tr / 3.0, &half).unwrap();
        assert!(back.max_abs_diff(&m).unwrap() < 1e-14);
    }

    #[test]
    fn ground_state_vector() {
        let r = state_to_bloch(&State::<f64>::basis(2, 0)).unwrap();
        assert_eq!(r.r, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn centroid_norm_identity_rank() {
        assert_eq!(centroid_norm::<f64>(4, 4), 0.0);
        assert_eq!(centroid_norm::<f64>(2, 1), 1.0);
    }
}
