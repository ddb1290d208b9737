//! Coefficient fields and small dense linear algebra over them.
//!
//! Two coefficient types are used throughout the crate: [`GaussRat`], complex
//! numbers with exact rational parts, and `Complex64`. Both implement
//! [`Coeff`]; the high-precision type in [`crate::precise`] joins them in the
//! [`Field`] trait so the same elimination code computes determinants in every
//! arithmetic.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Complex number with exact rational real and imaginary parts.
pub type GaussRat = Complex<BigRational>;

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

pub fn gauss(re: BigRational, im: BigRational) -> GaussRat {
    Complex::new(re, im)
}

pub fn gauss_int(re: i64, im: i64) -> GaussRat {
    Complex::new(int(re), int(im))
}

pub fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn gauss_to_c64(z: &GaussRat) -> Complex64 {
    Complex64::new(rat_to_f64(&z.re), rat_to_f64(&z.im))
}

/// Parses `p`, `p/q` or a finite decimal like `0.25` into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
        let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches('-'), frac);
        let n: BigInt = digits.parse().map_err(|_| Error::Parse(s.to_string()))?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let q = BigRational::new(n, d);
        return Ok(if neg { -q } else { q });
    }
    let p: BigInt = s.parse().map_err(|_| Error::Parse(s.to_string()))?;
    Ok(BigRational::from_integer(p))
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Ring operations shared by the coefficient types.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;
    fn from_gauss(z: &GaussRat) -> Self;
    fn conj(&self) -> Self;
    fn to_c64(&self) -> Complex64;
    fn to_value(&self) -> crate::scalar::CoeffValue;
    fn from_value(v: &crate::scalar::CoeffValue) -> Option<Self>;
}

impl Coeff for Complex64 {
    const EXACT: bool = false;
    fn from_gauss(z: &GaussRat) -> Self {
        gauss_to_c64(z)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn to_value(&self) -> crate::scalar::CoeffValue {
        crate::scalar::CoeffValue::Float(*self)
    }
    fn from_value(v: &crate::scalar::CoeffValue) -> Option<Self> {
        Some(match v {
            crate::scalar::CoeffValue::Exact(g) => gauss_to_c64(g),
            crate::scalar::CoeffValue::Float(z) => *z,
        })
    }
}

impl Coeff for GaussRat {
    const EXACT: bool = true;
    fn from_gauss(z: &GaussRat) -> Self {
        z.clone()
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn to_c64(&self) -> Complex64 {
        gauss_to_c64(self)
    }
    fn to_value(&self) -> crate::scalar::CoeffValue {
        crate::scalar::CoeffValue::Exact(self.clone())
    }
    fn from_value(v: &crate::scalar::CoeffValue) -> Option<Self> {
        match v {
            crate::scalar::CoeffValue::Exact(g) => Some(g.clone()),
            crate::scalar::CoeffValue::Float(_) => None,
        }
    }
}

/// A field in which we can eliminate.
pub trait Field:
    Clone
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Rough magnitude used only to rank pivots.
    fn magnitude(&self) -> f64;
}

impl Field for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Field for GaussRat {
    fn magnitude(&self) -> f64 {
        // pivots only need to be nonzero in exact arithmetic; prefer small
        // heights to keep the rationals short
        if self.is_zero() {
            0.0
        } else {
            let h = self.re.numer().bits()
                + self.re.denom().bits()
                + self.im.numer().bits()
                + self.im.denom().bits();
            1.0 / (1.0 + h as f64)
        }
    }
}

/// Determinant by Gaussian elimination with magnitude pivoting.
pub fn determinant<F: Field>(rows: &[Vec<F>]) -> F {
    let n = rows.len();
    if n == 0 {
        return F::one();
    }
    let mut m: Vec<Vec<F>> = rows.to_vec();
    let mut det = F::one();
    for col in 0..n {
        let mut best = None;
        let mut best_mag = 0.0;
        for (r, row) in m.iter().enumerate().skip(col) {
            if row[col].is_zero() {
                continue;
            }
            let mag = row[col].magnitude();
            if best.is_none() || mag > best_mag {
                best = Some(r);
                best_mag = mag;
            }
        }
        let Some(p) = best else {
            return F::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det = det * pivot.clone();
        for r in (col + 1)..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / pivot.clone();
            for c in col..n {
                let delta = factor.clone() * m[col][c].clone();
                m[r][c] = m[r][c].clone() - delta;
            }
        }
    }
    det
}

/// Solves `A x = b` for square nonsingular `A`; `None` when singular.
pub fn solve<F: Field>(a: &[Vec<F>], b: &[F]) -> Option<Vec<F>> {
    let n = a.len();
    let mut m: Vec<Vec<F>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let mut best = None;
        let mut best_mag = 0.0;
        for (r, row) in m.iter().enumerate().skip(col) {
            if row[col].is_zero() {
                continue;
            }
            let mag = row[col].magnitude();
            if best.is_none() || mag > best_mag {
                best = Some(r);
                best_mag = mag;
            }
        }
        let p = best?;
        m.swap(p, col);
        let pivot = m[col][col].clone();
        for c in col..=n {
            m[col][c] = m[col][c].clone() / pivot.clone();
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..=n {
                let delta = factor.clone() * m[col][c].clone();
                m[r][c] = m[r][c].clone() - delta;
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Integer power in a field, negative exponents through the inverse.
pub fn field_pow<F: Field>(base: &F, exp: i64) -> F {
    let mut acc = F::one();
    let mut b = if exp < 0 {
        F::one() / base.clone()
    } else {
        base.clone()
    };
    let mut e = exp.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b.clone();
        }
        b = b.clone() * b;
        e >>= 1;
    }
    acc
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Best rational approximation with bounded denominator (continued fractions).
pub fn rationalize(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    Some(BigRational::new(BigInt::from(p1), BigInt::from(q1)))
}

pub fn abs_rat(q: &BigRational) -> BigRational {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_matches_cofactor_expansion() {
        let m = vec![
            vec![gauss_int(2, 0), gauss_int(3, 0), gauss_int(5, 0)],
            vec![gauss_int(3, 0), gauss_int(5, 0), gauss_int(9, 0)],
            vec![gauss_int(5, 0), gauss_int(9, 0), gauss_int(17, 0)],
        ];
        assert!(determinant(&m).is_zero());
        let m = vec![
            vec![gauss_int(0, 0), gauss_int(1, 0)],
            vec![gauss_int(1, 0), gauss_int(4, 0)],
        ];
        assert_eq!(determinant(&m), gauss_int(-1, 0));
    }

    #[test]
    fn solve_small_system() {
        let a = vec![
            vec![gauss_int(1, 0), gauss_int(1, 0)],
            vec![gauss_int(1, 0), gauss_int(-1, 0)],
        ];
        let x = solve(&a, &[gauss_int(3, 1), gauss_int(1, 1)]).unwrap();
        assert_eq!(x, vec![gauss_int(2, 1), gauss_int(1, 0)]);
        let singular = vec![
            vec![gauss_int(1, 0), gauss_int(2, 0)],
            vec![gauss_int(2, 0), gauss_int(4, 0)],
        ];
        assert!(solve(&singular, &[gauss_int(1, 0), gauss_int(1, 0)]).is_none());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/5").unwrap(), rat(3, 5));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
    }

    #[test]
    fn rationalize_recovers_simple_fractions() {
        assert_eq!(rationalize(0.75, 1000).unwrap(), rat(3, 4));
        assert_eq!(rationalize(-7.0 / 3.0, 1000).unwrap(), rat(-7, 3));
    }

    #[test]
    fn pow_negative_exponent() {
        let two = gauss_int(2, 0);
        assert_eq!(field_pow(&two, -3), gauss(rat(1, 8), int(0)));
    }
}
