//! Effects, states, and Frobenius projections onto them.

use std::ops::Deref;

use super::HermitianMatrix;
use crate::error::{Error, Result};
use crate::scalar::{tolerance, Real};

/// A matrix in the operator interval `0 ⪯ E ⪯ I`.
#[derive(Clone, Debug, PartialEq)]
pub struct Effect<T: Real>(HermitianMatrix<T>);

impl<T: Real> Effect<T> {
    pub fn new(m: HermitianMatrix<T>) -> Result<Self> {
        let spec = m.eig()?;
        let tol = T::tol(tolerance::VERIFICATION);
        if spec.min() < -tol || spec.max() > T::one() + tol {
            return Err(Error::NotAnEffect {
                min: spec.min().to_f64().unwrap_or(f64::NAN),
                max: spec.max().to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: HermitianMatrix<T>) -> Self {
        Self(m)
    }

    pub fn zero(dim: usize) -> Self {
        Self(HermitianMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(HermitianMatrix::identity(dim))
    }

    /// `I − E`, the other outcome of the two-outcome POVM.
    pub fn complement(&self) -> Self {
        let id = HermitianMatrix::identity(self.0.dim());
        Self(&id - &self.0)
    }

    /// Outcome probability `Tr(Eρ)`.
    pub fn probability(&self, rho: &State<T>) -> Result<T> {
        super::hs_inner(&self.0, &rho.0)
    }

    pub fn matrix(&self) -> &HermitianMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> HermitianMatrix<T> {
        self.0
    }
}

impl<T: Real> Deref for Effect<T> {
    type Target = HermitianMatrix<T>;
    fn deref(&self) -> &HermitianMatrix<T> {
        &self.0
    }
}

/// A density matrix: positive semidefinite with unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct State<T: Real>(HermitianMatrix<T>);

impl<T: Real> State<T> {
    pub fn new(m: HermitianMatrix<T>) -> Result<Self> {
        let spec = m.eig()?;
        let tol = T::tol(tolerance::VERIFICATION);
        let tr = m.trace();
        if spec.min() < -tol || (tr - T::one()).abs() > tol {
            return Err(Error::NotAState {
                min_eigenvalue: spec.min().to_f64().unwrap_or(f64::NAN),
                trace: tr.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: HermitianMatrix<T>) -> Self {
        Self(m)
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self(HermitianMatrix::identity(dim).scale(T::one() / T::from_usize_lossy(dim)))
    }

    /// `|k⟩⟨k|` in the computational basis.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        let mut diag = vec![T::zero(); dim];
        diag[k] = T::one();
        Self(HermitianMatrix::from_real_diagonal(&diag))
    }

    pub fn matrix(&self) -> &HermitianMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> HermitianMatrix<T> {
        self.0
    }
}

impl<T: Real> Deref for State<T> {
    type Target = HermitianMatrix<T>;
    fn deref(&self) -> &HermitianMatrix<T> {
        &self.0
    }
}

/// Nearest effect in Frobenius norm: eigenvalues clipped to `[0, 1]`.
pub fn project_to_effect<T: Real>(m: &HermitianMatrix<T>) -> Result<Effect<T>> {
    let spec = m.eig()?;
    if spec.min() >= T::zero() && spec.max() <= T::one() {
        return Ok(Effect(m.clone()));
    }
    Ok(Effect(spec.map(|l| l.max(T::zero()).min(T::one()))))
}

/// Nearest state in Frobenius norm: eigenvalues projected onto the simplex.
pub fn project_to_state<T: Real>(m: &HermitianMatrix<T>) -> Result<State<T>> {
    let spec = m.eig()?;
    let values = project_simplex(&spec.eigenvalues, T::one());
    let unchanged = values
        .iter()
        .zip(&spec.eigenvalues)
        .all(|(a, b)| (*a - *b).abs() <= T::epsilon() * T::lit(4.0));
    if unchanged {
        return Ok(State(m.clone()));
    }
    Ok(State(spec.with_eigenvalues(&values)))
}

/// Euclidean projection of `u` onto `{x ≥ 0, Σx = total}` by sort and threshold.
pub fn project_simplex<T: Real>(u: &[T], total: T) -> Vec<T> {
    let mut sorted = u.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumsum = T::zero();
    let mut theta = T::zero();
    for (j, &x) in sorted.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - total) / T::from_usize_lossy(j + 1);
        // `>=` keeps the longer prefix on ties
        if x - t >= T::zero() {
            theta = t;
        }
    }
    u.iter().map(|&x| (x - theta).max(T::zero())).collect()
}

/// Euclidean projection onto `{0 ≤ x ≤ 1, Σx = total}` for `0 ≤ total ≤ len`.
pub fn project_capped_simplex<T: Real>(u: &[T], total: T) -> Vec<T> {
    let n = u.len();
    if total <= T::zero() {
        return vec![T::zero(); n];
    }
    if total >= T::from_usize_lossy(n) {
        return vec![T::one(); n];
    }
    let clip = |x: T| x.max(T::zero()).min(T::one());
    let mass = |theta: T| u.iter().map(|&x| clip(x - theta)).sum::<T>();
    let lo_u = u.iter().fold(T::infinity(), |a, &x| a.min(x));
    let hi_u = u.iter().fold(T::neg_infinity(), |a, &x| a.max(x));
    let mut lo = lo_u - T::one();
    let mut hi = hi_u;
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mass(mid) > total {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::epsilon() * T::one().max(hi.abs()) {
            break;
        }
    }
    // exact step on the active (unclipped) coordinates at the bracketed threshold
    let theta = (lo + hi) * T::lit(0.5);
    let mut fixed = T::zero();
    let mut free_sum = T::zero();
    let mut free = 0usize;
    for &x in u {
        let y = x - theta;
        if y >= T::one() {
            fixed += T::one();
        } else if y > T::zero() {
            free_sum += x;
            free += 1;
        }
    }
    let theta = if free > 0 {
        (free_sum + fixed - total) / T::from_usize_lossy(free)
    } else {
        theta
    };
    u.iter().map(|&x| clip(x - theta)).collect()
}

/// Euclidean projection onto the ℓ1 ball of the given radius.
pub fn project_l1_ball<T: Real>(u: &[T], radius: T) -> Vec<T> {
    let l1: T = u.iter().map(|x| x.abs()).sum();
    if l1 <= radius {
        return u.to_vec();
    }
    let abs: Vec<T> = u.iter().map(|x| x.abs()).collect();
    let w = project_simplex(&abs, radius);
    u.iter()
        .zip(w)
        .map(|(&x, m)| if x < T::zero() { -m } else { m })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clip_diagonal() {
        let m = HermitianMatrix::from_real_diagonal(&[2.0, -1.0]);
        let e = project_to_effect(&m).unwrap();
        assert!(e
            .max_abs_diff(&HermitianMatrix::from_real_diagonal(&[1.0, 0.0]))
            .unwrap()
            < 1e-15);
    }

    #[test]
    fn uniform_state_projection() {
        let m = HermitianMatrix::from_real_diagonal(&[0.8, 0.8]);
        let s = project_to_state(&m).unwrap();
        assert!(s
            .max_abs_diff(&HermitianMatrix::from_real_diagonal(&[0.5, 0.5]))
            .unwrap()
            < 1e-15);
    }

    #[test]
    fn simplex_examples() {
        assert_eq!(project_simplex(&[0.5, 0.5], 1.0), vec![0.5, 0.5]);
        assert_eq!(project_simplex(&[2.0, 0.0], 1.0), vec![1.0, 0.0]);
        let p = project_simplex(&[0.3f64, 0.3, 0.3], 1.0);
        assert!(p.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn capped_simplex_sums_to_total() {
        let p = project_capped_simplex(&[3.0f64, 0.2, 0.1, -1.0], 2.0);
        assert!((p.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert_eq!(p[0], 1.0);
        assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn l1_ball_projection() {
        let p = project_l1_ball(&[2.0f64, -2.0], 1.0);
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] + 0.5).abs() < 1e-15);
        assert_eq!(project_l1_ball(&[0.1, -0.2], 1.0), vec![0.1, -0.2]);
    }

    #[test]
    fn effect_and_state_validation() {
        assert!(Effect::new(HermitianMatrix::from_real_diagonal(&[1.5, 0.0])).is_err());
        assert!(State::new(HermitianMatrix::from_real_diagonal(&[0.5, 0.4])).is_err());
        assert!(State::new(HermitianMatrix::from_real_diagonal(&[0.5, 0.5])).is_ok());
        let e = Effect::new(HermitianMatrix::from_real_diagonal(&[0.25, 1.0])).unwrap();
        assert_eq!(e.complement().diagonal(), vec![0.75, 0.0]);
    }
}
