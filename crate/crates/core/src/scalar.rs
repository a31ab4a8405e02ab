//! Scalar abstraction for the quaternion core.

use nalgebra::RealField;
use num_traits::{FloatConst, ToPrimitive};

/// Real scalar usable by the quaternion and isometry code: `f32` or `f64`.
pub trait Real: RealField + FloatConst + ToPrimitive + Copy + Send + Sync {
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    /// Tolerance `x` for `f64`, floored at a few ulps of the working precision.
    #[inline]
    fn tol(x: f64) -> Self {
        let floor = Self::default_epsilon() * Self::lit(16.0);
        let t = Self::lit(x);
        if t < floor {
            floor
        } else {
            t
        }
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn clamp_unit(self) -> Self {
        let one = Self::one();
        if self > one {
            one
        } else if self < -one {
            -one
        } else {
            self
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_floor_depends_on_precision() {
        assert_eq!(<f64 as Real>::tol(1e-12), 1e-12);
        assert!(<f32 as Real>::tol(1e-12) > 1e-7);
    }
}
