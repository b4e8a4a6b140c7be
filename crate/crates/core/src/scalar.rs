//! Real scalar abstraction shared by the numerical core.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point field used by the matrix and Bloch layers: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// A tolerance that is at least a few ulps wide at unit scale.
    ///
    /// For `f64` this is the requested value; for `f32` tolerances such as
    /// `1e-10` are widened to what the type can actually resolve.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(64.0))
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Tolerances used throughout the numerical core.
pub mod tolerance {
    /// Hermiticity check when a matrix is built from raw entries.
    pub const CONSTRUCTION: f64 = 1e-12;
    /// Effect/state membership and reconstruction checks.
    pub const VERIFICATION: f64 = 1e-10;
    /// Jacobi stopping threshold on the off-diagonal Frobenius norm,
    /// relative to `max(1, ‖M‖_F)`.
    pub const JACOBI_OFF_DIAGONAL: f64 = 1e-12;
    /// Jacobi sweep cap.
    pub const JACOBI_MAX_SWEEPS: usize = 100;
    /// Orthogonality of rank-one families.
    pub const ORTHOGONALITY: f64 = 1e-9;
    /// Unit-norm check for pure-state Bloch vectors.
    pub const BLOCH_NORM: f64 = 1e-9;
    /// Slack on shattering margins.
    pub const MARGIN_SLACK: f64 = 1e-9;
    /// Slack on outcome probabilities before clamping to `[0, 1]`.
    pub const PROBABILITY: f64 = 1e-9;
}
