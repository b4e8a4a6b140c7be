use super::HermitianMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Exponent of a Schatten norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SchattenP<T> {
    Finite(T),
    Infinity,
}

impl<T: Real> SchattenP<T> {
    pub fn trace() -> Self {
        SchattenP::Finite(T::one())
    }

    pub fn frobenius() -> Self {
        SchattenP::Finite(T::lit(2.0))
    }

    pub fn operator() -> Self {
        SchattenP::Infinity
    }
}

/// Schatten p-norm `(Σ|λᵢ|^p)^{1/p}`; `p = ∞` gives `max|λᵢ|`.
pub fn schatten_norm<T: Real>(m: &HermitianMatrix<T>, p: SchattenP<T>) -> Result<T> {
    if let SchattenP::Finite(p) = p {
        if !(p >= T::one()) {
            return Err(Error::InvalidSchattenExponent(p.to_f64().unwrap_or(f64::NAN)));
        }
        if p.is_infinite() {
            return schatten_norm(m, SchattenP::Infinity);
        }
    }
    let spec = m.eig()?;
    Ok(schatten_of_values(&spec.eigenvalues, p))
}

pub(crate) fn schatten_of_values<T: Real>(values: &[T], p: SchattenP<T>) -> T {
    let top = values.iter().fold(T::zero(), |a, &l| a.max(l.abs()));
    match p {
        SchattenP::Infinity => top,
        SchattenP::Finite(p) => {
            if top == T::zero() {
                return T::zero();
            }
            if p == T::one() {
                return values.iter().map(|l| l.abs()).sum();
            }
            // scale by the largest magnitude to avoid overflow for large p
            let s: T = values.iter().map(|l| (l.abs() / top).powf(p)).sum();
            top * s.powf(T::one() / p)
        }
    }
}

/// Hilbert–Schmidt inner product `Tr(AB)` of two Hermitian matrices.
pub fn hs_inner<T: Real>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>) -> Result<T> {
    a.check_dim(b)?;
    // Tr(AB) = Σ_ij A_ij B_ji = Σ_ij A_ij conj(B_ij)
    let mut re = T::zero();
    let mut im = T::zero();
    for (x, y) in a.entries().iter().zip(b.entries()) {
        let z = *x * y.conj();
        re += z.re;
        im += z.im;
    }
    let scale = T::one().max(a.frobenius_norm() * b.frobenius_norm());
    debug_assert!(im.abs() <= T::tol(1e-12) * scale, "imaginary residue {im}");
    Ok(re)
}
