//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use num_complex::Complex;

use super::{ComplexMatrix, HermitianMatrix};
use crate::error::{Error, Result};
use crate::scalar::{tolerance, Real};

/// Eigendecomposition `M = V Λ V†` with eigenvalues in descending order and
/// eigenvectors stored as the columns of `V`.
#[derive(Clone, Debug)]
pub struct Spectrum<T: Real> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> Spectrum<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(T) -> T) -> HermitianMatrix<T> {
        let values: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.with_eigenvalues(&values)
    }

    /// `V diag(values) V†`.
    pub fn with_eigenvalues(&self, values: &[T]) -> HermitianMatrix<T> {
        let d = self.dim();
        assert_eq!(values.len(), d);
        let v = &self.eigenvectors;
        let mut data = vec![Complex::new(T::zero(), T::zero()); d * d];
        for (k, &lam) in values.iter().enumerate() {
            if lam == T::zero() {
                continue;
            }
            for i in 0..d {
                let vik = v.get(i, k) * lam;
                for j in i..d {
                    data[i * d + j] += vik * v.get(j, k).conj();
                }
            }
        }
        for i in 0..d {
            for j in 0..i {
                data[i * d + j] = data[j * d + i].conj();
            }
        }
        HermitianMatrix::from_raw(d, data)
    }

    pub fn reconstruct(&self) -> HermitianMatrix<T> {
        self.with_eigenvalues(&self.eigenvalues)
    }

    /// `‖M − VΛV†‖_F`.
    pub fn residual(&self, m: &HermitianMatrix<T>) -> T {
        self.reconstruct().distance(m).unwrap_or_else(|_| T::infinity())
    }

    pub fn max(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn min(&self) -> T {
        self.eigenvalues[self.dim() - 1]
    }
}

fn off_diagonal_norm<T: Real>(a: &[Complex<T>], d: usize) -> T {
    let mut s = T::zero();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += a[i * d + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
///
/// Each rotation first removes the phase of the pivot `a_pq`, then applies
/// the real Jacobi rotation that annihilates it. Iteration stops once the
/// off-diagonal Frobenius norm drops below `1e-12 · max(1, ‖M‖_F)`.
pub fn eig_hermitian<T: Real>(m: &HermitianMatrix<T>) -> Result<Spectrum<T>> {
    let d = m.dim();
    let mut a: Vec<Complex<T>> = m.entries().to_vec();
    let mut v = ComplexMatrix::identity(d);
    let zero = Complex::new(T::zero(), T::zero());
    let threshold = T::tol(tolerance::JACOBI_OFF_DIAGONAL) * T::one().max(m.frobenius_norm());

    let mut sweep = 0;
    loop {
        let off = off_diagonal_norm(&a, d);
        if off <= threshold {
            break;
        }
        if sweep == tolerance::JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNonConvergence {
                sweeps: sweep,
                residual: off.to_f64().unwrap_or(f64::NAN),
            });
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[p * d + q];
                let mag = apq.norm();
                if mag == T::zero() {
                    continue;
                }
                let app = a[p * d + p].re;
                let aqq = a[q * d + q].re;
                let phase_conj = (apq / mag).conj();
                let tau = (aqq - app) / (T::lit(2.0) * mag);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // U restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
                let u_pp = Complex::new(c, T::zero());
                let u_pq = Complex::new(s, T::zero());
                let u_qp = phase_conj * (-s);
                let u_qq = phase_conj * c;

                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = akp * u_pp + akq * u_qp;
                    a[k * d + q] = akp * u_pq + akq * u_qq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[q * d + k] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[p * d + q] = zero;
                a[q * d + p] = zero;
                a[p * d + p].im = T::zero();
                a[q * d + q].im = T::zero();

                let vd = v.data_mut();
                for k in 0..d {
                    let vkp = vd[k * d + p];
                    let vkq = vd[k * d + q];
                    vd[k * d + p] = vkp * u_pp + vkq * u_qp;
                    vd[k * d + q] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
        sweep += 1;
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        a[j * d + j]
            .re
            .partial_cmp(&a[i * d + i].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues = order.iter().map(|&i| a[i * d + i].re).collect();
    let mut vecs = vec![zero; d * d];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..d {
            vecs[row * d + new_col] = v.get(row, old_col);
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: ComplexMatrix::new(d, vecs)?,
    })
}
