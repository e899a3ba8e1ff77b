//! Floating-point scalar abstraction shared by the numeric kernels.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar the simulator and quadrature code are generic over: `f32` or `f64`.
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Default + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal or parameter.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any float scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
