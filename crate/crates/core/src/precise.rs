//! High-precision complex arithmetic for determinants that underflow `f64`.
//!
//! The Hankel scans of `h` produce determinants many orders of magnitude
//! below double-precision rounding noise, so they are evaluated here with
//! 512-bit binary floats.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, RoundingMode};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exact::Field;

/// Working precision in bits.
pub const PRECISION: usize = 512;
const RM: RoundingMode = RoundingMode::ToEven;

fn big_int(n: &BigInt) -> BigFloat {
    let (sign, digits) = n.to_u32_digits();
    let mut acc = BigFloat::from_u32(0, PRECISION);
    let base = BigFloat::from_u64(1u64 << 32, PRECISION);
    for d in digits.iter().rev() {
        acc = acc
            .mul(&base, PRECISION, RM)
            .add(&BigFloat::from_u32(*d, PRECISION), PRECISION, RM);
    }
    if sign == num_bigint::Sign::Minus {
        acc.neg()
    } else {
        acc
    }
}

/// Real number at [`PRECISION`] bits.
#[derive(Clone)]
pub struct HpReal(BigFloat);

impl HpReal {
    pub fn from_i64(n: i64) -> Self {
        Self(BigFloat::from_i64(n, PRECISION))
    }

    pub fn from_rational(q: &BigRational) -> Self {
        Self(big_int(q.numer()).div(&big_int(q.denom()), PRECISION, RM))
    }

    pub fn sqrt(&self) -> Self {
        Self(self.0.sqrt(PRECISION, RM))
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Base-2 exponent, `None` for zero.
    pub fn log2_magnitude(&self) -> Option<f64> {
        if self.0.is_zero() {
            return None;
        }
        // the mantissa is normalized to [1/2, 1)
        let e = self.0.exponent()? as f64;
        let scaled = {
            let mut m = self.0.abs();
            m.set_exponent(0);
            to_f64(&m)
        };
        Some(e + scaled.log2())
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.0)
    }
}

fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    format!("{x}").parse::<f64>().unwrap_or(f64::NAN)
}

impl fmt::Debug for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl Add for HpReal {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0.add(&rhs.0, PRECISION, RM))
    }
}

impl Sub for HpReal {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0.sub(&rhs.0, PRECISION, RM))
    }
}

impl Mul for HpReal {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0.mul(&rhs.0, PRECISION, RM))
    }
}

impl Div for HpReal {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self(self.0.div(&rhs.0, PRECISION, RM))
    }
}

impl Neg for HpReal {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.neg())
    }
}

impl Zero for HpReal {
    fn zero() -> Self {
        Self::from_i64(0)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for HpReal {
    fn one() -> Self {
        Self::from_i64(1)
    }
}

/// Complex number with [`HpReal`] parts.
#[derive(Clone, Debug)]
pub struct HpComplex {
    pub re: HpReal,
    pub im: HpReal,
}

impl HpComplex {
    pub fn new(re: HpReal, im: HpReal) -> Self {
        Self { re, im }
    }

    pub fn real(re: HpReal) -> Self {
        Self {
            re,
            im: HpReal::zero(),
        }
    }

    pub fn norm_sqr(&self) -> HpReal {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn norm(&self) -> HpReal {
        self.norm_sqr().sqrt()
    }

    /// `log10 |z|`, finite even when `|z|` is far below `f64::MIN_POSITIVE`.
    pub fn log10_norm(&self) -> f64 {
        match self.norm_sqr().log2_magnitude() {
            Some(l2) => 0.5 * l2 * std::f64::consts::LOG10_2,
            None => f64::NEG_INFINITY,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for HpComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for HpComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for HpComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let re = self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone();
        let im = self.re * rhs.im + self.im * rhs.re;
        Self::new(re, im)
    }
}

impl Div for HpComplex {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let d = rhs.norm_sqr();
        let re = self.re.clone() * rhs.re.clone() + self.im.clone() * rhs.im.clone();
        let im = self.im * rhs.re - self.re * rhs.im;
        Self::new(re / d.clone(), im / d)
    }
}

impl Neg for HpComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Zero for HpComplex {
    fn zero() -> Self {
        Self::real(HpReal::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for HpComplex {
    fn one() -> Self {
        Self::real(HpReal::one())
    }
}

impl Field for HpComplex {
    fn magnitude(&self) -> f64 {
        // pivot ranking in log scale; tiny entries stay distinguishable
        self.log10_norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{determinant, rat};

    #[test]
    fn rational_roundtrip() {
        let x = HpReal::from_rational(&rat(3, 5));
        assert!((x.to_f64() - 0.6).abs() < 1e-16);
        let big = BigInt::from(1u64 << 40) * BigInt::from(1u64 << 40);
        let y = HpReal::from_rational(&BigRational::from_integer(big));
        assert!((y.to_f64() - 2f64.powi(80)).abs() / 2f64.powi(80) < 1e-15);
    }

    #[test]
    fn tiny_determinants_keep_their_size() {
        let eps = HpReal::from_rational(&rat(1, 1)) / HpReal::from_i64(10).sqrt();
        let mut e = HpComplex::real(HpReal::one());
        for _ in 0..200 {
            e = e * HpComplex::real(eps.clone());
        }
        // 10^-100 on the diagonal of a 2x2
        let m = vec![
            vec![e.clone(), HpComplex::zero()],
            vec![HpComplex::one(), HpComplex::one()],
        ];
        let d = determinant(&m);
        assert!((d.log10_norm() + 100.0).abs() < 1e-9);
    }
}
