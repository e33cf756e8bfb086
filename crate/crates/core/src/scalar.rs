//! Scalar abstraction: every numeric kernel in this crate is generic over a
//! floating-point type. `f64` is the working precision; `f32` instantiates for
//! callers that can live with its roundoff.

/// Floating-point scalar usable by the geometry and solver kernels.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::NumAssignOps
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Lift an `f64` constant into this scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable in scalar type")
    }

    /// Lower to `f64`, e.g. for diagnostics and serialized reports.
    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("scalar not representable as f64")
    }

    /// Lift a small integer exactly.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("integer not representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}
