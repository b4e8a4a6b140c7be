#![allow(dead_code)]

use proptest::prelude::*;
use qlearn::{Complex64, HermitianMatrix};

/// `(A + A†)/2` from `2d²` real numbers.
pub fn hermitian_from(d: usize, raw: &[f64]) -> HermitianMatrix {
    let a = |i: usize, j: usize| Complex64::new(raw[2 * (i * d + j)], raw[2 * (i * d + j) + 1]);
    let mut e = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            e.push((a(i, j) + a(j, i).conj()) * 0.5);
        }
    }
    HermitianMatrix::new(d, e).expect("hermitian by construction")
}

pub fn hermitian(dmax: usize) -> impl Strategy<Value = HermitianMatrix> {
    (1..=dmax).prop_flat_map(|d| {
        prop::collection::vec(-2.0f64..2.0, 2 * d * d).prop_map(move |raw| hermitian_from(d, &raw))
    })
}

pub fn hermitian_pair(dmax: usize) -> impl Strategy<Value = (HermitianMatrix, HermitianMatrix)> {
    (1..=dmax).prop_flat_map(|d| {
        (
            prop::collection::vec(-2.0f64..2.0, 2 * d * d),
            prop::collection::vec(-2.0f64..2.0, 2 * d * d),
        )
            .prop_map(move |(a, b)| (hermitian_from(d, &a), hermitian_from(d, &b)))
    })
}

/// `M v` for a column vector `v`.
pub fn apply(m: &HermitianMatrix, v: &[Complex64]) -> Vec<Complex64> {
    let d = m.dim();
    (0..d)
        .map(|i| (0..d).map(|j| m.get(i, j) * v[j]).sum())
        .collect()
}

/// Eigenvalues by a direct check: `Σ|λ|` etc. are computed from these.
pub fn eigenvalues(m: &HermitianMatrix) -> Vec<f64> {
    m.eig().unwrap().eigenvalues
}

pub fn trace_norm(m: &HermitianMatrix) -> f64 {
    eigenvalues(m).iter().map(|l| l.abs()).sum()
}

pub fn op_norm(m: &HermitianMatrix) -> f64 {
    eigenvalues(m).iter().fold(0.0, |a, l| a.max(l.abs()))
}

/// `Σ|mᵢⱼ|²` straight from the entries.
pub fn frobenius_sq(m: &HermitianMatrix) -> f64 {
    m.entries().iter().map(|z| z.norm_sqr()).sum()
}
