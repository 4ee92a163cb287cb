//! Scalar abstraction shared by every numerical routine in the crate.

use std::cell::RefCell;
use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Real floating-point type the library computes with.
///
/// Implemented for `f32` and `f64`. The FFT hook lets generic code run
/// transforms without carrying `rustfft`'s own numeric bounds around.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    /// In-place complex DFT. The forward transform uses `exp(-2πijk/N)`;
    /// neither direction is normalised.
    fn fft(buffer: &mut [Complex<Self>], inverse: bool);

    /// Converts an `f64` literal. Panics only if the value is not
    /// representable, which never happens for the finite constants used here.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite literal")
    }

    #[inline]
    fn of_usize(value: usize) -> Self {
        Self::from_usize(value).expect("index fits the scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn fft(buffer: &mut [Complex<$t>], inverse: bool) {
                thread_local! {
                    static PLANNER: RefCell<FftPlanner<$t>> = RefCell::new(FftPlanner::new());
                }
                let plan = PLANNER.with(|planner| {
                    let mut planner = planner.borrow_mut();
                    if inverse {
                        planner.plan_fft_inverse(buffer.len())
                    } else {
                        planner.plan_fft_forward(buffer.len())
                    }
                });
                plan.process(buffer);
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);

/// Relative-or-absolute closeness, used by invariant checks.
pub fn close<T: Scalar>(a: T, b: T, tol: T) -> bool {
    (a - b).abs() <= tol * (T::one() + a.abs().max(b.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_roundtrip_f32_and_f64() {
        let mut x: Vec<Complex<f64>> = (0..16).map(|j| Complex::new(j as f64, 0.0)).collect();
        let original = x.clone();
        f64::fft(&mut x, false);
        f64::fft(&mut x, true);
        for (a, b) in x.iter().zip(&original) {
            assert!((a.re / 16.0 - b.re).abs() < 1e-12);
        }

        let mut y: Vec<Complex<f32>> = (0..8).map(|j| Complex::new(1.0, j as f32)).collect();
        f32::fft(&mut y, false);
        assert!((y[0].re - 8.0).abs() < 1e-5);
    }
}
