//! Exact coefficient rings.
//!
//! Rings are passed around as context values (`&R`) rather than encoded in
//! the element type, so that a prime field can carry its modulus and a
//! polynomial ring its arity.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

mod fp;
mod poly;
mod unipoly;

pub use fp::{PrimeField, DEFAULT_PRIMES};
pub use poly::{Monomial, MultiPoly, PolyRing};
pub use unipoly::{uni_root_structure, UniPoly};

pub trait Ring {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn from_int(&self, v: &BigInt) -> Self::Elem;
    /// Image of a rational number; fails when the denominator is not
    /// invertible in the ring.
    fn from_rational(&self, v: &BigRational) -> Result<Self::Elem>;

    fn from_i64(&self, v: i64) -> Self::Elem {
        self.from_int(&BigInt::from(v))
    }

    fn scale_sign(&self, a: &Self::Elem, sign: i8) -> Self::Elem {
        match sign {
            0 => self.zero(),
            s if s > 0 => a.clone(),
            _ => self.neg(a),
        }
    }

    /// Rough size of an element, used to prefer cheap pivots.
    fn weight(&self, _a: &Self::Elem) -> usize {
        0
    }

    fn pow(&self, a: &Self::Elem, e: u32) -> Self::Elem {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }
}

/// An integral domain with exact division.
pub trait Domain: Ring {
    /// `a / b`, defined only when `b` divides `a`.
    fn div_exact(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
}

pub trait Field: Domain {
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Integers;

#[derive(Clone, Copy, Debug, Default)]
pub struct Rationals;

impl Ring for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn from_int(&self, v: &BigInt) -> BigInt {
        v.clone()
    }
    fn weight(&self, a: &BigInt) -> usize {
        a.bits() as usize
    }
    fn from_rational(&self, v: &BigRational) -> Result<BigInt> {
        if v.is_integer() {
            Ok(v.to_integer())
        } else {
            Err(Error::InexactDivision)
        }
    }
}

impl Domain for Integers {
    fn div_exact(&self, a: &BigInt, b: &BigInt) -> Result<BigInt> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (q, r) = num_integer::Integer::div_rem(a, b);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::InexactDivision)
        }
    }
}

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn from_int(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }
    fn from_rational(&self, v: &BigRational) -> Result<BigRational> {
        Ok(v.clone())
    }
}

impl Domain for Rationals {
    fn div_exact(&self, a: &BigRational, b: &BigRational) -> Result<BigRational> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(a / b)
    }
}

impl Field for Rationals {
    fn inv(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(a.recip())
    }
}

/// Parses `"12"`, `"-7"` or `"3/4"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not a decimal integer or fraction"));
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(n))
        }
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().map_err(|_| bad())?;
            let d: BigInt = den.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(BigRational::new(n, d))
        }
    }
}

/// Decimal string of a rational: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(v: &BigRational) -> String {
    if v.is_integer() {
        v.to_integer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}
