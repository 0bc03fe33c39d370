//! Polynomials with Gaussian-integer coefficients and their text syntax.
//!
//! Two input forms are accepted:
//!
//! * expressions in `x`, e.g. `x^2 - i`, `3x - 6`, `(1+2i)x^3 + ix - 4`;
//! * coefficient lists in descending powers, e.g. `[1, 0, -i]`.
//!
//! Whitespace is insignificant. Terms may appear in any order and repeated
//! powers are summed.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::numeric::GaussInt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("polynomial is constant (degree 0)")]
    DegreeZero,
    #[error("leading coefficient is zero")]
    LeadingZero,
}

fn parse_err<T>(pos: usize, msg: impl Into<String>) -> Result<T, PolyError> {
    Err(PolyError::Parse { pos, msg: msg.into() })
}

/// `a₀xᵐ + a₁xᵐ⁻¹ + … + a_m` with `a₀ ≠ 0` and `m ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<GaussInt>,
}

impl Polynomial {
    /// Coefficients in descending powers, `a₀` first.
    pub fn new(coeffs: Vec<GaussInt>) -> Result<Self, PolyError> {
        match coeffs.first() {
            None => Err(PolyError::DegreeZero),
            Some(a0) if a0.is_zero() => Err(PolyError::LeadingZero),
            Some(_) if coeffs.len() < 2 => Err(PolyError::DegreeZero),
            Some(_) => Ok(Polynomial { coeffs }),
        }
    }

    pub fn coeffs(&self) -> &[GaussInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &GaussInt {
        &self.coeffs[0]
    }

    /// Horner evaluation in floating point.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_complex())
    }

    /// `|p(z)|`.
    pub fn residual(&self, z: Complex64) -> f64 {
        self.evaluate(z).norm()
    }

    /// The coefficient list form, `[a0, a1, ...]`.
    pub fn to_list_string(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(", "))
    }
}

pub fn parse_polynomial(text: &str) -> Result<Polynomial, PolyError> {
    text.parse()
}

pub fn evaluate_residual(p: &Polynomial, z: Complex64) -> f64 {
    p.residual(z)
}

/// Parses a single Gaussian-integer literal such as `3`, `-i`, `2-5i`.
pub fn parse_gauss(text: &str) -> Result<GaussInt, PolyError> {
    let mut p = Parser::new(text);
    let z = p.gauss()?;
    p.expect_end()?;
    Ok(z)
}

impl FromStr for Polynomial {
    type Err = PolyError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut p = Parser::new(text);
        let coeffs = if p.peek() == Some('[') { p.list()? } else { p.expression()? };
        p.expect_end()?;
        Polynomial::new(coeffs)
    }
}

impl FromStr for GaussInt {
    type Err = PolyError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        parse_gauss(text)
    }
}

struct Parser {
    chars: Vec<(usize, char)>,
    at: usize,
    len: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        let chars: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        Parser { chars, at: 0, len: text.len() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).map(|&(_, c)| c)
    }

    fn pos(&self) -> usize {
        self.chars.get(self.at).map_or(self.len, |&(p, _)| p)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), PolyError> {
        if self.eat(c) {
            Ok(())
        } else {
            parse_err(self.pos(), format!("expected '{c}'"))
        }
    }

    fn expect_end(&self) -> Result<(), PolyError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => parse_err(self.pos(), format!("unexpected '{c}'")),
        }
    }

    fn uint(&mut self) -> Option<BigInt> {
        let start = self.at;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.at += 1;
        }
        if start == self.at {
            return None;
        }
        let digits: String = self.chars[start..self.at].iter().map(|&(_, c)| c).collect();
        Some(digits.parse().expect("ascii digits"))
    }

    fn sign(&mut self) -> Option<bool> {
        if self.eat('+') {
            Some(false)
        } else if self.eat('-') {
            Some(true)
        } else {
            None
        }
    }

    /// `[+|-] (uint | uint? "i") [(+|-) uint? "i"]`
    fn gauss(&mut self) -> Result<GaussInt, PolyError> {
        let neg = self.sign().unwrap_or(false);
        let first_pos = self.pos();
        let mag = self.uint();
        let mut z = if self.eat('i') {
            GaussInt::new(0, mag.unwrap_or_else(BigInt::one))
        } else if let Some(m) = mag {
            GaussInt::from(m)
        } else {
            return parse_err(first_pos, "expected a number or 'i'");
        };
        if neg {
            z = -z;
        }
        if z.im.is_zero() && matches!(self.peek(), Some('+' | '-')) {
            let save = self.at;
            let neg_im = self.sign() == Some(true);
            let mag = self.uint();
            if self.eat('i') {
                let im = mag.unwrap_or_else(BigInt::one);
                z.im = if neg_im { -im } else { im };
            } else {
                self.at = save;
            }
        }
        Ok(z)
    }

    fn list(&mut self) -> Result<Vec<GaussInt>, PolyError> {
        self.expect('[')?;
        let mut out = vec![self.gauss()?];
        while self.eat(',') {
            out.push(self.gauss()?);
        }
        self.expect(']')?;
        Ok(out)
    }

    fn expression(&mut self) -> Result<Vec<GaussInt>, PolyError> {
        let mut terms: Vec<(usize, GaussInt)> = Vec::new();
        let mut neg = self.sign().unwrap_or(false);
        loop {
            let (power, mut c) = self.term()?;
            if neg {
                c = -c;
            }
            terms.push((power, c));
            match self.sign() {
                Some(n) => neg = n,
                None => break,
            }
        }
        let degree = terms.iter().map(|&(p, _)| p).max().unwrap_or(0);
        let mut coeffs = vec![GaussInt::zero(); degree + 1];
        for (power, c) in terms {
            let slot = &mut coeffs[degree - power];
            *slot = &*slot + &c;
        }
        if degree == 0 {
            return Err(PolyError::DegreeZero);
        }
        Ok(coeffs)
    }

    /// `coeff? ("x" ("^" uint)?)?` with at least one of the two parts.
    fn term(&mut self) -> Result<(usize, GaussInt), PolyError> {
        let start = self.pos();
        let coeff = self.coeff()?;
        let power = if self.eat('x') {
            if self.eat('^') {
                let at = self.pos();
                let p = self.uint().ok_or(PolyError::Parse { pos: at, msg: "expected exponent".into() })?;
                match usize::try_from(p) {
                    Ok(p) if p <= 1 << 20 => Some(p),
                    _ => return parse_err(at, "exponent too large"),
                }
            } else {
                Some(1)
            }
        } else {
            None
        };
        match (coeff, power) {
            (None, None) => parse_err(start, "expected a term"),
            (c, p) => Ok((p.unwrap_or(0), c.unwrap_or_else(GaussInt::one))),
        }
    }

    /// `uint | "i" | uint "i" | "(" gauss ")"`
    fn coeff(&mut self) -> Result<Option<GaussInt>, PolyError> {
        if self.eat('(') {
            let z = self.gauss()?;
            self.expect(')')?;
            return Ok(Some(z));
        }
        let mag = self.uint();
        if self.eat('i') {
            return Ok(Some(GaussInt::new(0, mag.unwrap_or_else(BigInt::one))));
        }
        Ok(mag.map(GaussInt::from))
    }
}

/// Expression form, e.g. `x^2 - 3x + 2`, `(1+i)x - 2i`. Round-trips through
/// the parser.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.degree();
        let mut first = true;
        for (idx, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let power = m - idx;
            // pull a leading minus out of purely real or purely imaginary coefficients
            let (neg, body) = if c.im.is_zero() && c.re.is_negative() || c.re.is_zero() && c.im.is_negative() {
                (true, -c)
            } else {
                (false, c.clone())
            };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let coeff = if !body.re.is_zero() && !body.im.is_zero() {
                format!("({body})")
            } else if power > 0 && body == GaussInt::one() {
                String::new()
            } else {
                body.to_string()
            };
            f.write_str(&coeff)?;
            match power {
                0 => {}
                1 => f.write_str("x")?,
                p => write!(f, "x^{p}")?,
            }
        }
        Ok(())
    }
}
