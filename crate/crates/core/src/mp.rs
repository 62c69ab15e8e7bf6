//! Fixed-precision binary floating point backed by `astro_float`.

use crate::real::Real;
use astro_float::{BigFloat, RoundingMode, Sign};
use num_traits::{Num, One, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

const RM: RoundingMode = RoundingMode::ToEven;

/// A real number carried with `BITS` bits of mantissa.
#[derive(Clone)]
pub struct Mp<const BITS: usize>(BigFloat);

impl<const BITS: usize> Mp<BITS> {
    pub fn inner(&self) -> &BigFloat {
        &self.0
    }
}

impl<const BITS: usize> fmt::Debug for Mp<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mp<{BITS}>({:e})", self.to_f64())
    }
}

impl<const BITS: usize> PartialEq for Mp<BITS> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl<const BITS: usize> PartialOrd for Mp<BITS> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl<const BITS: usize> $tr for Mp<BITS> {
            type Output = Self;
            fn $m(self, rhs: Self) -> Self {
                Mp(self.0.$m(&rhs.0, BITS, RM))
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl<const BITS: usize> Rem for Mp<BITS> {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        Mp(self.0.rem(&rhs.0))
    }
}

impl<const BITS: usize> Neg for Mp<BITS> {
    type Output = Self;
    fn neg(self) -> Self {
        Mp(self.0.neg())
    }
}

impl<const BITS: usize> Zero for Mp<BITS> {
    fn zero() -> Self {
        Mp(BigFloat::from_f64(0.0, BITS))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl<const BITS: usize> One for Mp<BITS> {
    fn one() -> Self {
        Mp(BigFloat::from_f64(1.0, BITS))
    }
}

impl<const BITS: usize> Num for Mp<BITS> {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        debug_assert_eq!(radix, 10);
        s.parse::<f64>().map(|x| Mp(BigFloat::from_f64(x, BITS)))
    }
}

impl<const BITS: usize> Real for Mp<BITS> {
    fn from_f64(x: f64) -> Self {
        Mp(BigFloat::from_f64(x, BITS))
    }

    fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_zero() {
            return 0.0;
        }
        let Some((m, _, s, e, _)) = self.0.as_raw_parts() else {
            return if self.0.is_inf_neg() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            };
        };
        let n = m.len();
        let hi = m[n - 1] as f64;
        let lo = if n > 1 { m[n - 2] as f64 } else { 0.0 };
        let scale = 18_446_744_073_709_551_616.0;
        // 2^e may over/underflow as a single factor; split it.
        let v = (hi + lo / scale) / scale * 2f64.powi(e / 2) * 2f64.powi(e - e / 2);
        if s == Sign::Neg {
            -v
        } else {
            v
        }
    }

    fn sqrt(&self) -> Self {
        Mp(self.0.sqrt(BITS, RM))
    }

    fn epsilon() -> f64 {
        2f64.powi(-(BITS as i32))
    }

    fn abs(&self) -> Self {
        Mp(self.0.abs())
    }

    fn powi(&self, n: i32) -> Self {
        let p = Mp(self.0.powi(n.unsigned_abs() as usize, BITS, RM));
        if n < 0 {
            Self::one() / p
        } else {
            p
        }
    }
}

/// Precision tiers available to callers that choose precision at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Double,
    Bits256,
    Bits512,
    Bits768,
}

impl Precision {
    /// Smallest tier carrying `needed` bits.
    pub fn for_bits(needed: f64) -> Self {
        if needed <= 50.0 {
            Precision::Double
        } else if needed <= 256.0 {
            Precision::Bits256
        } else if needed <= 512.0 {
            Precision::Bits512
        } else {
            Precision::Bits768
        }
    }

    pub fn bits(self) -> usize {
        match self {
            Precision::Double => 53,
            Precision::Bits256 => 256,
            Precision::Bits512 => 512,
            Precision::Bits768 => 768,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = Mp<256>;

    #[test]
    fn roundtrip_f64() {
        for x in [0.0, 1.0, -2.5, 0.3, 1e-200, 7.25e150, -3.0e-300] {
            assert_eq!(M::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn arithmetic_beyond_double() {
        let third = M::one() / M::from_f64(3.0);
        let back = third.clone() * M::from_f64(3.0) - M::one();
        assert!(back.abs().to_f64() < 1e-70);
        let big = M::from_f64(1e40);
        let r = (big.clone() + M::one()) - big;
        assert_eq!(r.to_f64(), 1.0);
    }

    #[test]
    fn sqrt_and_powers() {
        let two = M::from_f64(2.0);
        let s = two.sqrt();
        assert!((s.clone() * s - two.clone()).abs().to_f64() < 1e-70);
        assert_eq!(two.powi(10).to_f64(), 1024.0);
        assert_eq!(two.powi(-2).to_f64(), 0.25);
    }

    #[test]
    fn ordering() {
        assert!(M::from_f64(-1.0) < M::from_f64(0.5));
        assert!(M::from_f64(-1.0).abs() > M::from_f64(0.5));
    }

    #[test]
    fn tiers() {
        assert_eq!(Precision::for_bits(40.0), Precision::Double);
        assert_eq!(Precision::for_bits(300.0), Precision::Bits512);
        assert_eq!(Precision::for_bits(2000.0), Precision::Bits768);
    }
}
