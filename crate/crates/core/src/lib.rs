//! Learning two-outcome quantum measurements and quantum states as linear
//! functionals, with empirical estimators for the complexity quantities that
//! govern their sample complexity.
//!
//! The matrix and Bloch layers are generic over [`scalar::Real`] (`f32` or
//! `f64`). Everything above them works in `f64`; the aliases at the crate
//! root name the `f64` types.

pub mod bloch;
pub mod complexity;
pub mod ensembles;
pub mod error;
pub mod learners;
pub mod matrix;
pub mod qra;
pub mod scalar;
pub mod wire;

mod linalg;

pub use error::{Error, Result};
pub use scalar::Real;

pub type HermitianMatrix = matrix::HermitianMatrix<f64>;
pub type ComplexMatrix = matrix::ComplexMatrix<f64>;
pub type Spectrum = matrix::Spectrum<f64>;
pub type Effect = matrix::Effect<f64>;
pub type State = matrix::State<f64>;
pub type BlochVector = bloch::BlochVector<f64>;
pub type EffectFunctional = bloch::EffectFunctional<f64>;
pub type GeneratorBasis = bloch::GeneratorBasis<f64>;

pub type HermitianMatrixF32 = matrix::HermitianMatrix<f32>;
pub type EffectF32 = matrix::Effect<f32>;
pub type StateF32 = matrix::State<f32>;
pub type BlochVectorF32 = bloch::BlochVector<f32>;

pub type Complex64 = num_complex::Complex<f64>;
