//! Scalar traits shared by the geometry and the coefficient algebra.

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, One, Signed, ToPrimitive, Zero};
use rustfft::FftNum;

/// Real floating scalar used by all numerical code (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Signed
    + FftNum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`].
pub type C<T> = Complex<T>;

/// Field element usable as a symmetric-tensor coefficient.
///
/// Implemented for floating complex numbers, exact rationals, and exact
/// Gaussian rationals.
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn conj(&self) -> Self;
    /// The rational number `num/den` embedded in the coefficient field.
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self;
    /// Magnitude as an `f64`, for residual reporting.
    fn magnitude(&self) -> f64;

    fn from_int(k: i64) -> Self {
        Self::from_ratio(&BigInt::from(k), &BigInt::one())
    }
}

fn ratio_f64(num: &BigInt, den: &BigInt) -> f64 {
    let q = BigRational::new(num.clone(), den.clone());
    q.to_f64().unwrap_or(f64::NAN)
}

impl<T: Real> Coeff for Complex<T> {
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        Complex::new(T::lit(ratio_f64(num, den)), T::zero())
    }
    fn magnitude(&self) -> f64 {
        self.norm().to_f64_lossy()
    }
}

impl Coeff for BigRational {
    fn conj(&self) -> Self {
        self.clone()
    }
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        BigRational::new(num.clone(), den.clone())
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Coeff for Complex<BigRational> {
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        Complex::new(BigRational::new(num.clone(), den.clone()), BigRational::zero())
    }
    fn magnitude(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::INFINITY);
        let im = self.im.to_f64().unwrap_or(f64::INFINITY);
        re.hypot(im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_embeddings_agree() {
        let n = BigInt::from(3);
        let d = BigInt::from(8);
        let a: Complex<f64> = Coeff::from_ratio(&n, &d);
        let b: BigRational = Coeff::from_ratio(&n, &d);
        let c: Complex<BigRational> = Coeff::from_ratio(&n, &d);
        assert_eq!(a.re, 0.375);
        assert_eq!(b.magnitude(), 0.375);
        assert_eq!(c.magnitude(), 0.375);
    }

    #[test]
    fn gaussian_rational_conj() {
        let one = BigRational::one();
        let z = Complex::new(one.clone(), one.clone());
        let w = Coeff::conj(&z);
        assert_eq!(w.im, -one);
    }
}
