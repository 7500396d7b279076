//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar usable by the solvers (`f32` or `f64`).
///
/// Tolerances are scaled per type: the `f64` values are the reference ones,
/// `f32` gets looser bounds matching its precision.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug + Send + Sync + 'static
{
    /// Max absolute deviation of `BᵀB` from the identity for a valid basis.
    const ORTHO_TOL: f64;
    /// Relative tolerance for comparing two losses.
    const LOSS_RTOL: f64;

    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 is representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).expect("real scalar converts to f64")
    }
}

impl Real for f64 {
    const ORTHO_TOL: f64 = 1e-10;
    const LOSS_RTOL: f64 = 1e-9;
}

impl Real for f32 {
    const ORTHO_TOL: f64 = 1e-4;
    const LOSS_RTOL: f64 = 1e-4;
}

/// `true` when two losses agree within `T::LOSS_RTOL` relative to the larger
/// one, with an absolute floor of `T::LOSS_RTOL * scale`.
///
/// `scale` should be the total energy of the data (squared Frobenius norm);
/// it keeps near-zero losses from being compared on rounding noise.
pub fn losses_agree<T: Real>(a: T, b: T, scale: T) -> bool {
    let tol = T::lit(T::LOSS_RTOL);
    let mag = a.abs().max(b.abs()).max(scale.abs());
    (a - b).abs() <= tol * mag
}
