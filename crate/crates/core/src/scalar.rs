//! Scalar abstraction shared by every numeric routine.

use nalgebra as na;
use num_traits as nt;

/// Floating point types the library can run on.
pub trait Float:
    Copy
    + nt::FloatConst
    + nt::FromPrimitive
    + nt::ToPrimitive
    + na::RealField
    + na::Scalar
    + serde::Serialize
    + for<'de> serde::Deserialize<'de>
    + std::fmt::LowerExp
{
    const ZERO: Self;
    const ONE: Self;
    const TWO: Self;
    const HALF: Self;
    const EPS: Self;

    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self;

    fn to_f64_lossy(self) -> f64;

    fn nat(k: usize) -> Self {
        Self::lit(k as f64)
    }
}

macro_rules! impl_float {
    ($f:ident) => {
        impl Float for $f {
            const ZERO: Self = 0.0;
            const ONE: Self = 1.0;
            const TWO: Self = 2.0;
            const HALF: Self = 0.5;
            const EPS: Self = $f::EPSILON;

            #[inline]
            fn lit(x: f64) -> Self {
                x as $f
            }

            #[inline]
            fn to_f64_lossy(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_float!(f32);
impl_float!(f64);

/// Shorthand for `T::lit`.
#[inline]
pub fn lit<T: Float>(x: f64) -> T {
    T::lit(x)
}

/// Euclidean remainder `x mod m` in `[0, m)`.
#[inline]
pub fn rem_euclid<T: Float>(x: T, m: T) -> T {
    let r = x - m * (x / m).floor();
    if r >= m {
        r - m
    } else {
        r
    }
}
