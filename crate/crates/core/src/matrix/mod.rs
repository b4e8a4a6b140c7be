//! Dense complex Hermitian linear algebra at small dimension.
//!
//! Matrices are stored row-major with the dimension as runtime data. Every
//! value is immutable after construction; operations return new matrices.

mod convex;
mod eigen;
mod norms;

pub use convex::{
    project_capped_simplex, project_l1_ball, project_simplex, project_to_effect,
    project_to_state, Effect, State,
};
pub use eigen::{eig_hermitian, Spectrum};
pub use norms::{hs_inner, schatten_norm, SchattenP};

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{tolerance, Real};

/// Complex scalar over the real field `T`.
pub type ComplexScalar<T> = Complex<T>;

/// A `d × d` complex self-adjoint matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T: Real> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> HermitianMatrix<T> {
    /// Builds a Hermitian matrix from row-major entries.
    ///
    /// Entries must satisfy `A_ij = conj(A_ji)` to within the construction
    /// tolerance (relative to the largest entry); the stored matrix is the
    /// exact Hermitian part.
    pub fn new(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let mut scale = T::one();
        for (k, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite {
                    row: k / dim,
                    col: k % dim,
                });
            }
            scale = scale.max(z.norm());
        }
        let mut asym = T::zero();
        for i in 0..dim {
            for j in i..dim {
                let a = entries[i * dim + j];
                let b = entries[j * dim + i].conj();
                asym = asym.max((a - b).norm());
            }
        }
        if asym > T::tol(tolerance::CONSTRUCTION) * scale {
            return Err(Error::NotHermitian {
                asymmetry: asym.to_f64().unwrap_or(f64::NAN),
            });
        }
        let mut m = Self { dim, data: entries };
        m.symmetrize();
        Ok(m)
    }

    /// Builds from nested rows.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(dim, data)
    }

    /// Builds from real row-major entries (a real symmetric matrix).
    pub fn from_real(dim: usize, entries: &[T]) -> Result<Self> {
        Self::new(
            dim,
            entries.iter().map(|&x| Complex::new(x, T::zero())).collect(),
        )
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let dim = diag.len();
        assert!(dim > 0, "empty diagonal");
        let mut data = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for (i, &x) in diag.iter().enumerate() {
            data[i * dim + i] = Complex::new(x, T::zero());
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real_diagonal(&vec![T::one(); dim])
    }

    /// The outer product `|ψ⟩⟨ψ|` (no normalization).
    pub fn outer(psi: &[Complex<T>]) -> Self {
        let dim = psi.len();
        assert!(dim > 0, "empty vector");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(psi[i] * psi[j].conj());
            }
        }
        let mut m = Self { dim, data };
        m.symmetrize();
        m
    }

    /// The rank-one projector onto `ψ / ‖ψ‖`.
    pub fn pure_state(psi: &[Complex<T>]) -> Result<Self> {
        let norm_sq: T = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm_sq > T::zero()) || !norm_sq.is_finite() {
            return Err(Error::InvalidParameter(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        let inv = T::one() / norm_sq.sqrt();
        let unit: Vec<_> = psi.iter().map(|z| *z * inv).collect();
        Ok(Self::outer(&unit))
    }

    pub(crate) fn from_raw(dim: usize, data: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        let mut m = Self { dim, data };
        m.symmetrize();
        m
    }

    fn symmetrize(&mut self) {
        let d = self.dim;
        let half = T::lit(0.5);
        for i in 0..d {
            let z = self.data[i * d + i];
            self.data[i * d + i] = Complex::new(z.re, T::zero());
            for j in (i + 1)..d {
                let avg = (self.data[i * d + j] + self.data[j * d + i].conj()) * half;
                self.data[i * d + j] = avg;
                self.data[j * d + i] = avg.conj();
            }
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim + col]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<Complex<T>>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).collect()
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    pub fn scale(&self, a: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| *z * a).collect(),
        }
    }

    /// `self + a · other`.
    pub fn add_scaled(&self, a: T, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| *x + *y * a)
                .collect(),
        })
    }

    /// In-place `self += a · other`.
    pub fn axpy(&mut self, a: T, other: &Self) -> Result<()> {
        self.check_dim(other)?;
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += *y * a;
        }
        Ok(())
    }

    /// Frobenius (Schatten-2) norm computed from the entries.
    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Frobenius distance to `other`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        self.check_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (*x - *y).norm_sqr())
            .sum::<T>()
            .sqrt())
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (*x - *y).norm())
            .fold(T::zero(), T::max))
    }

    /// `A²`, which is again Hermitian.
    pub fn square(&self) -> Self {
        let d = self.dim;
        let mut out = vec![Complex::new(T::zero(), T::zero()); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] += a * self.data[k * d + j];
                }
            }
        }
        Self::from_raw(d, out)
    }

    /// General product `self · other`.
    pub fn matmul(&self, other: &Self) -> Result<ComplexMatrix<T>> {
        self.check_dim(other)?;
        Ok(ComplexMatrix::from_hermitian(self).matmul(&ComplexMatrix::from_hermitian(other)))
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        if u.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: u.dim(),
            });
        }
        let prod = u.matmul(&ComplexMatrix::from_hermitian(self)).matmul(&u.adjoint());
        Ok(Self::from_raw(self.dim, prod.into_entries()))
    }

    pub fn eig(&self) -> Result<Spectrum<T>> {
        eig_hermitian(self)
    }

    /// Applies `f` to the eigenvalues, keeping the eigenvectors.
    pub fn map_spectrum(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Ok(self.eig()?.map(f))
    }

    /// Converts to another scalar type.
    pub fn cast<U: Real>(&self) -> HermitianMatrix<U> {
        HermitianMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .map(|z| {
                    Complex::new(
                        U::from_f64(z.re.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(U::nan),
                        U::from_f64(z.im.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(U::nan),
                    )
                })
                .collect(),
        }
    }

    pub(crate) fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

impl<T: Real> Add for &HermitianMatrix<T> {
    type Output = HermitianMatrix<T>;
    fn add(self, rhs: Self) -> HermitianMatrix<T> {
        self.add_scaled(T::one(), rhs).expect("dimension mismatch in add")
    }
}

impl<T: Real> Sub for &HermitianMatrix<T> {
    type Output = HermitianMatrix<T>;
    fn sub(self, rhs: Self) -> HermitianMatrix<T> {
        self.add_scaled(-T::one(), rhs).expect("dimension mismatch in sub")
    }
}

impl<T: Real> Neg for &HermitianMatrix<T> {
    type Output = HermitianMatrix<T>;
    fn neg(self) -> HermitianMatrix<T> {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul<T> for &HermitianMatrix<T> {
    type Output = HermitianMatrix<T>;
    fn mul(self, rhs: T) -> HermitianMatrix<T> {
        self.scale(rhs)
    }
}

/// A general dense square complex matrix (unitaries, eigenvector bases).
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex::new(T::one(), T::zero());
        }
        Self { dim, data }
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex<T>>]) -> Result<Self> {
        let dim = columns.len();
        let mut data = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for (j, col) in columns.iter().enumerate() {
            if col.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: col.len(),
                });
            }
            for (i, z) in col.iter().enumerate() {
                data[i * dim + j] = *z;
            }
        }
        Ok(Self { dim, data })
    }

    pub(crate) fn from_hermitian(h: &HermitianMatrix<T>) -> Self {
        Self {
            dim: h.dim,
            data: h.data.clone(),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim + col]
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub(crate) fn into_entries(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.dim).map(|i| self.data[i * self.dim + j]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut data = vec![Complex::new(T::zero(), T::zero()); d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        Self { dim: d, data }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let d = self.dim;
        let mut out = vec![Complex::new(T::zero(), T::zero()); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                for j in 0..d {
                    out[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        Self { dim: d, data: out }
    }

    pub fn frobenius_distance(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (*x - *y).norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// `‖U†U − I‖_F`.
    pub fn unitarity_defect(&self) -> T {
        self.adjoint()
            .matmul(self)
            .frobenius_distance(&Self::identity(self.dim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn rejects_non_hermitian() {
        let err = HermitianMatrix::new(2, vec![c(1., 0.), c(0., 1.), c(0., 1.), c(0., 0.)]);
        assert!(matches!(err, Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_wrong_length_and_zero_dim() {
        assert!(HermitianMatrix::<f64>::new(2, vec![c(1., 0.); 3]).is_err());
        assert!(matches!(
            HermitianMatrix::<f64>::new(0, vec![]),
            Err(Error::InvalidDimension(0))
        ));
    }

    #[test]
    fn construction_tolerance_symmetrizes() {
        let m = HermitianMatrix::new(
            2,
            vec![c(1., 1e-14), c(0.5, 0.25), c(0.5, -0.25 + 1e-14), c(2., 0.)],
        )
        .unwrap();
        assert_eq!(m.get(0, 0).im, 0.0);
        assert_eq!(m.get(1, 0), m.get(0, 1).conj());
    }

    #[test]
    fn square_matches_general_product() {
        let m = HermitianMatrix::new(2, vec![c(1., 0.), c(2., -1.), c(2., 1.), c(-3., 0.)]).unwrap();
        let sq = m.square();
        let prod = m.matmul(&m).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((sq.get(i, j) - prod.get(i, j)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn pure_state_is_normalized() {
        let p = HermitianMatrix::pure_state(&[c(3., 0.), c(0., 4.)]).unwrap();
        assert!((p.trace() - 1.0).abs() < 1e-15);
        assert!(HermitianMatrix::<f64>::pure_state(&[c(0., 0.)]).is_err());
    }
}
