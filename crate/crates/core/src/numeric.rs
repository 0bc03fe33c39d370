//! Exact Gaussian-integer and Gaussian-rational arithmetic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("division by zero Gaussian integer")]
    DivisionByZero,
}

/// A complex number `re + im·i` with arbitrary-precision integer parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussInt { re: re.into(), im: im.into() }
    }

    pub fn zero() -> Self {
        GaussInt::default()
    }

    pub fn one() -> Self {
        GaussInt::new(1, 0)
    }

    pub fn i() -> Self {
        GaussInt::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussInt { re: self.re.clone(), im: -&self.im }
    }

    /// Squared modulus `re² + im²`.
    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        GaussInt { re: &self.re * k, im: &self.im * k }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(big_to_f64(&self.re), big_to_f64(&self.im))
    }
}

impl From<i64> for GaussInt {
    fn from(re: i64) -> Self {
        GaussInt::new(re, 0)
    }
}

impl From<BigInt> for GaussInt {
    fn from(re: BigInt) -> Self {
        GaussInt { re, im: BigInt::zero() }
    }
}

impl<'a> Add<&'a GaussInt> for &'a GaussInt {
    type Output = GaussInt;
    fn add(self, rhs: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Sub<&'a GaussInt> for &'a GaussInt {
    type Output = GaussInt;
    fn sub(self, rhs: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a GaussInt> for &'a GaussInt {
    type Output = GaussInt;
    fn mul(self, rhs: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re * &rhs.re - &self.im * &rhs.im, im: &self.re * &rhs.im + &self.im * &rhs.re }
    }
}

impl Add for GaussInt {
    type Output = GaussInt;
    fn add(self, rhs: GaussInt) -> GaussInt {
        &self + &rhs
    }
}

impl Sub for GaussInt {
    type Output = GaussInt;
    fn sub(self, rhs: GaussInt) -> GaussInt {
        &self - &rhs
    }
}

impl Mul for GaussInt {
    type Output = GaussInt;
    fn mul(self, rhs: GaussInt) -> GaussInt {
        &self * &rhs
    }
}

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt { re: -self.re, im: -self.im }
    }
}

impl Neg for &GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt { re: -&self.re, im: -&self.im }
    }
}

/// Formats as `3`, `-i`, `2i`, `1+2i`, `-4-i`. The output is accepted back
/// by the Gaussian literal parser.
impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let mag = self.im.abs();
        let imag = if mag.is_one() { "i".to_string() } else { format!("{mag}i") };
        if self.re.is_zero() {
            if self.im.is_negative() {
                write!(f, "-{imag}")
            } else {
                write!(f, "{imag}")
            }
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "{}{}{}", self.re, sign, imag)
        }
    }
}

/// An exact complex rational `num / den` in canonical form: `den > 0` and
/// `gcd(num.re, num.im, den) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussRational {
    num: GaussInt,
    den: BigInt,
}

impl GaussRational {
    /// Builds and canonicalizes `num / den`.
    pub fn new(num: GaussInt, den: BigInt) -> Result<Self, NumericError> {
        if den.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        let mut g = num.re.gcd(&num.im).gcd(&den);
        if den.is_negative() {
            g = -g;
        }
        Ok(GaussRational { num: GaussInt { re: &num.re / &g, im: &num.im / &g }, den: &den / &g })
    }

    pub fn from_gauss(z: GaussInt) -> Self {
        GaussRational { num: z, den: BigInt::one() }
    }

    pub fn num(&self) -> &GaussInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_gauss_int(&self) -> bool {
        self.den.is_one()
    }

    pub fn mul_gauss(&self, z: &GaussInt) -> GaussRational {
        GaussRational::new(&self.num * z, self.den.clone()).expect("denominator is positive")
    }

    /// Nearest `f64` of each component. Components beyond the `f64` range
    /// saturate to infinity.
    pub fn to_float(&self) -> Complex64 {
        let re = BigRational::new(self.num.re.clone(), self.den.clone());
        let im = BigRational::new(self.num.im.clone(), self.den.clone());
        Complex64::new(re.to_f64().unwrap_or(f64::NAN), im.to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else if self.num.re.is_zero() || self.num.im.is_zero() {
            write!(f, "{}/{}", self.num, self.den)
        } else {
            write!(f, "({})/{}", self.num, self.den)
        }
    }
}

/// Exact quotient `z1 / z2 = z1·conj(z2) / |z2|²`.
pub fn gauss_divide(z1: &GaussInt, z2: &GaussInt) -> Result<GaussRational, NumericError> {
    if z2.is_zero() {
        return Err(NumericError::DivisionByZero);
    }
    GaussRational::new(z1 * &z2.conj(), z2.norm())
}

pub fn to_float(q: &GaussRational) -> Complex64 {
    q.to_float()
}

pub(crate) fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}
