//! Scalar abstraction shared by the double-precision and multiprecision paths.

use num_complex::Complex;
use num_traits::Num;
use std::fmt::Debug;
use std::ops::Neg;

pub trait Real:
    Num + Neg<Output = Self> + Clone + PartialOrd + Debug + Send + Sync + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn sqrt(&self) -> Self;
    /// Unit roundoff of the representation.
    fn epsilon() -> f64;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }

    fn powi(&self, n: i32) -> Self {
        let mut base = if n < 0 {
            Self::one() / self.clone()
        } else {
            self.clone()
        };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn epsilon() -> f64 {
        f64::EPSILON / 2.0
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
}

/// Modulus of a complex value, estimated in double precision.
pub fn cabs<T: Real>(z: &Complex<T>) -> f64 {
    z.re.to_f64().hypot(z.im.to_f64())
}

pub fn cx<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

pub fn to_c64<T: Real>(z: &Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn from_c64<T: Real>(z: Complex<f64>) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

pub fn conj<T: Real>(z: &Complex<T>) -> Complex<T> {
    Complex::new(z.re.clone(), -z.im.clone())
}

pub fn norm_sqr<T: Real>(z: &Complex<T>) -> T {
    z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()
}

