//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, NumCast};

/// Floating point scalar the solvers and fitters are written against: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumCast + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only if the value cannot be represented,
    /// which does not happen for finite literals and the two supported types.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Physical constants (CODATA 2018, exact where SI defines them).
pub mod consts {
    /// Vacuum permittivity, F/m.
    pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
    /// Reduced Planck constant, J s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Planck constant, J s.
    pub const PLANCK: f64 = 6.626_070_15e-34;
    /// Elementary charge, C.
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    /// Boltzmann constant, J/K.
    pub const BOLTZMANN: f64 = 1.380_649e-23;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic_sum<T: Real>(xs: &[f64]) -> T {
        xs.iter().map(|&x| T::lit(x)).sum()
    }

    #[test]
    fn literals_round_trip_in_both_widths() {
        assert_eq!(generic_sum::<f64>(&[0.5, 0.25]), 0.75);
        assert_eq!(generic_sum::<f32>(&[0.5, 0.25]), 0.75f32);
        assert_eq!(f32::two(), 2.0);
        assert_eq!(f64::from_usize_lossy(7), 7.0);
    }
}
