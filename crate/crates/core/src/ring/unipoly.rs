use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::format_rational;
use crate::error::{Error, Result};

/// Dense univariate polynomial over Q, coefficients from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<BigRational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        UniPoly::new(coeffs.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly { coeffs: vec![BigRational::one()] }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn scale(&self, s: &BigRational) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    pub fn pow(&self, e: u32) -> UniPoly {
        let mut acc = UniPoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn monic(&self) -> Option<UniPoly> {
        let lc = self.leading()?.clone();
        Some(self.scale(&lc.recip()))
    }

    /// The unique polynomial of degree `< xs.len()` through the given points
    /// (Newton divided differences).
    pub fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> Result<UniPoly> {
        if xs.len() != ys.len() {
            return Err(Error::Dimension(format!("{} nodes but {} values", xs.len(), ys.len())));
        }
        let n = xs.len();
        let mut dd: Vec<BigRational> = ys.to_vec();
        for j in 1..n {
            for i in (j..n).rev() {
                let den = &xs[i] - &xs[i - j];
                if den.is_zero() {
                    return Err(Error::InvalidParameters("repeated interpolation node".into()));
                }
                dd[i] = (&dd[i] - &dd[i - 1]) / den;
            }
        }
        let mut acc = UniPoly::zero();
        for i in (0..n).rev() {
            let factor = UniPoly::new(vec![-xs[i].clone(), BigRational::one()]);
            acc = acc.mul(&factor).add(&UniPoly::new(vec![dd[i].clone()]));
        }
        Ok(acc)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format_rational(c),
                1 => format!("({})*t", format_rational(c)),
                _ => format!("({})*t^{}", format_rational(c), i),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Finds monic `g` with `f = c * g^r` for a nonzero constant `c`, matching
/// coefficients from the leading term down.
pub fn uni_root_structure(f: &UniPoly, r: u32) -> Option<UniPoly> {
    if r == 0 {
        return None;
    }
    let fm = f.monic()?;
    let deg = fm.degree()?;
    let r_us = r as usize;
    if deg % r_us != 0 {
        return None;
    }
    let m = deg / r_us;
    let mut g = vec![BigRational::zero(); m + 1];
    g[m] = BigRational::one();
    let r_q = BigRational::from_integer(BigInt::from(r));
    for j in 1..=m {
        let h = UniPoly::new(g.clone()).pow(r);
        let diff = fm.coeff(deg - j) - h.coeff(deg - j);
        g[m - j] = diff / &r_q;
    }
    let g = UniPoly::new(g);
    if g.pow(r) == fm {
        Some(g)
    } else {
        None
    }
}
