//! Dense exact linear algebra over the rings in [`crate::ring`].

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ring::{Domain, Field, Integers, PrimeField, Ring};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, v: T) -> Self {
        Matrix { rows, cols, data: vec![v; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(Error::Dimension(format!("row {} has length {}, expected {}", i, row.len(), c)));
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<U: Clone>(&self, f: impl Fn(&T) -> Result<U>) -> Result<Matrix<U>> {
        let data = self.data.iter().map(f).collect::<Result<Vec<U>>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Reorders rows and columns: entry `(i, j)` of the result is entry
    /// `(perm[i], perm[j])` of `self`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Self {
        assert!(self.is_square() && perm.len() == self.rows);
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(perm[i], perm[j]).clone())
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix<T>) -> Result<Self> {
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(Error::Dimension(format!("cannot stack widths {} and {}", self.cols, other.cols)));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix { rows: self.rows + other.rows, cols, data })
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.data[i * self.cols + j].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn identity<R: Ring>(ring: &R, n: usize) -> Matrix<R::Elem> {
    Matrix::from_fn(n, n, |i, j| if i == j { ring.one() } else { ring.zero() })
}

pub fn mat_mul<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Result<Matrix<R::Elem>> {
    if a.cols != b.rows {
        return Err(Error::Dimension(format!("{}x{} times {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    Ok(Matrix::from_fn(a.rows, b.cols, |i, j| {
        let mut acc = ring.zero();
        for l in 0..a.cols {
            let (x, y) = (a.get(i, l), b.get(l, j));
            if !ring.is_zero(x) && !ring.is_zero(y) {
                acc = ring.add(&acc, &ring.mul(x, y));
            }
        }
        acc
    }))
}

pub fn int_matrix(rows: &[Vec<i64>]) -> Matrix<BigInt> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect())
        .expect("ragged literal matrix")
}

pub fn to_rational(m: &Matrix<BigInt>) -> Matrix<BigRational> {
    m.map(|v| BigRational::from_integer(v.clone()))
}

/// Fraction-free Gaussian elimination (Bareiss) with row pivoting; all
/// intermediate divisions are exact in any integral domain.
pub fn det_bareiss<R: Domain>(ring: &R, m: &Matrix<R::Elem>) -> Result<R::Elem> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("determinant of a {}x{} matrix", m.rows, m.cols)));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(ring.one());
    }
    let mut a = m.to_rows();
    let mut negate = false;
    let mut prev = ring.one();
    for k in 0..n - 1 {
        let pivot = (k..n)
            .filter(|&i| !ring.is_zero(&a[i][k]))
            .min_by_key(|&i| ring.weight(&a[i][k]));
        let Some(p) = pivot else {
            return Ok(ring.zero());
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = ring.sub(&ring.mul(&a[i][j], &a[k][k]), &ring.mul(&a[i][k], &a[k][j]));
                a[i][j] = ring.div_exact(&num, &prev)?;
            }
            a[i][k] = ring.zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negate { ring.neg(&d) } else { d })
}

/// Laplace expansion along the first row. Exponential; meant for small
/// matrices and as a test oracle.
pub fn det_cofactor<R: Ring>(ring: &R, m: &Matrix<R::Elem>) -> Result<R::Elem> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("determinant of a {}x{} matrix", m.rows, m.cols)));
    }
    let cols: Vec<usize> = (0..m.cols).collect();
    Ok(cofactor_rec(ring, m, 0, &cols))
}

fn cofactor_rec<R: Ring>(ring: &R, m: &Matrix<R::Elem>, row: usize, cols: &[usize]) -> R::Elem {
    if cols.is_empty() {
        return ring.one();
    }
    let mut acc = ring.zero();
    for (idx, &c) in cols.iter().enumerate() {
        let entry = m.get(row, c);
        if ring.is_zero(entry) {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = ring.mul(entry, &cofactor_rec(ring, m, row + 1, &rest));
        acc = if idx % 2 == 0 { ring.add(&acc, &term) } else { ring.sub(&acc, &term) };
    }
    acc
}

/// Cofactor expansion below size 5, Bareiss otherwise.
pub fn det_exact<R: Domain>(ring: &R, m: &Matrix<R::Elem>) -> Result<R::Elem> {
    if m.rows < 5 {
        det_cofactor(ring, m)
    } else {
        det_bareiss(ring, m)
    }
}

/// Gaussian elimination over a field.
pub fn det_field<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Result<F::Elem> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("determinant of a {}x{} matrix", m.rows, m.cols)));
    }
    let n = m.rows;
    let mut a = m.to_rows();
    let mut det = field.one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !field.is_zero(&a[i][k])) else {
            return Ok(field.zero());
        };
        if p != k {
            a.swap(p, k);
            det = field.neg(&det);
        }
        det = field.mul(&det, &a[k][k]);
        let inv = field.inv(&a[k][k])?;
        for i in k + 1..n {
            if field.is_zero(&a[i][k]) {
                continue;
            }
            let f = field.mul(&a[i][k], &inv);
            for j in k..n {
                let t = field.mul(&f, &a[k][j]);
                a[i][j] = field.sub(&a[i][j], &t);
            }
        }
    }
    Ok(det)
}

/// Rank over a field by row reduction.
pub fn rank_field<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Result<usize> {
    let (_, pivots) = row_echelon(field, m)?;
    Ok(pivots.len())
}

/// Reduced row echelon form and pivot columns.
pub fn row_echelon<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Result<(Matrix<F::Elem>, Vec<usize>)> {
    let mut a = m.to_rows();
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !field.is_zero(&a[i][c])) else {
            continue;
        };
        a.swap(p, r);
        let inv = field.inv(&a[r][c])?;
        for j in c..cols {
            a[r][j] = field.mul(&a[r][j], &inv);
        }
        for i in 0..rows {
            if i == r || field.is_zero(&a[i][c]) {
                continue;
            }
            let f = a[i][c].clone();
            for j in c..cols {
                let t = field.mul(&f, &a[r][j]);
                a[i][j] = field.sub(&a[i][j], &t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let out = if rows == 0 { Matrix { rows: 0, cols, data: Vec::new() } } else { Matrix::from_rows(a)? };
    Ok((out, pivots))
}

/// Rank of an integer matrix by fraction-free elimination with full pivoting.
pub fn rank_bareiss(m: &Matrix<BigInt>) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.to_rows();
    let mut prev = BigInt::one();
    let mut r = 0;
    while r < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for i in r..rows {
            for j in r..cols {
                if a[i][j].is_zero() {
                    continue;
                }
                if best.map_or(true, |(bi, bj)| a[i][j].bits() < a[bi][bj].bits()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(pi, r);
        if pj != r {
            for row in a.iter_mut() {
                row.swap(pj, r);
            }
        }
        for i in r + 1..rows {
            for j in r + 1..cols {
                let num = &a[i][j] * &a[r][r] - &a[i][r] * &a[r][j];
                a[i][j] = num / &prev;
            }
            a[i][r] = BigInt::zero();
        }
        prev = a[r][r].clone();
        r += 1;
    }
    r
}

/// Exact rank over Q. A rank computed modulo a prime is a lower bound; when it
/// is already maximal it is exact, otherwise fraction-free elimination decides.
pub fn rank_exact(m: &Matrix<BigInt>) -> usize {
    let f = PrimeField::default();
    let reduced = m.map(|v| f.from_int(v));
    let lower = rank_field(&f, &reduced).expect("prime field elimination");
    if lower == m.rows.min(m.cols) {
        return lower;
    }
    rank_bareiss(m)
}

/// Clears denominators row by row, which preserves rank.
pub fn clear_denominators(m: &Matrix<BigRational>) -> Matrix<BigInt> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(m.rows);
    for i in 0..m.rows {
        let l = m.row(i).iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        rows.push(m.row(i).iter().map(|v| (v * BigRational::from_integer(l.clone())).to_integer()).collect());
    }
    Matrix { rows: m.rows, cols: m.cols, data: rows.into_iter().flatten().collect() }
}

pub fn rank_rational(m: &Matrix<BigRational>) -> usize {
    rank_exact(&clear_denominators(m))
}

pub fn corank(m: &Matrix<BigInt>) -> usize {
    m.cols - rank_exact(m)
}

/// A nonzero vector `v` with `m v = 0`, if the kernel is nontrivial.
pub fn kernel_vector(m: &Matrix<BigRational>) -> Result<Option<Vec<BigRational>>> {
    let field = crate::ring::Rationals;
    let (rref, pivots) = row_echelon(&field, m)?;
    let Some(free) = (0..m.cols).find(|c| !pivots.contains(c)) else {
        return Ok(None);
    };
    let mut v = vec![BigRational::zero(); m.cols];
    v[free] = BigRational::one();
    for (r, &pc) in pivots.iter().enumerate() {
        v[pc] = -rref.get(r, free).clone();
    }
    Ok(Some(v))
}

/// True iff `h` has corank one and its adjugate has rank one.
///
/// For corank one the adjugate is `c * u * v^T` with `h u = 0`, `v^T h = 0`,
/// so it has rank one exactly when one cofactor at a position where both
/// kernel vectors are nonzero does not vanish.
pub fn adjugate_rank_check(h: &Matrix<BigRational>) -> Result<bool> {
    if !h.is_square() {
        return Err(Error::Dimension("adjugate of a non-square matrix".into()));
    }
    if h.rows == 0 || h.cols - rank_rational(h) != 1 {
        return Ok(false);
    }
    let u = kernel_vector(h)?.expect("corank one");
    let v = kernel_vector(&h.transpose())?.expect("corank one");
    let j = u.iter().position(|x| !x.is_zero()).expect("nonzero kernel vector");
    let i = v.iter().position(|x| !x.is_zero()).expect("nonzero kernel vector");
    let rows: Vec<usize> = (0..h.rows).filter(|&r| r != i).collect();
    let cols: Vec<usize> = (0..h.cols).filter(|&c| c != j).collect();
    let minor = clear_denominators(&h.submatrix(&rows, &cols));
    Ok(!det_bareiss(&Integers, &minor)?.is_zero())
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes below `2^31`, in decreasing order.
pub fn primes_below_2_31() -> impl Iterator<Item = u64> {
    (1u64..(1 << 31)).rev().filter(|&n| n % 2 == 1 && is_prime_u64(n))
}

/// Bit length bound on `|det m|` from Hadamard's inequality.
fn hadamard_bits(m: &Matrix<BigInt>) -> u64 {
    (0..m.rows)
        .map(|i| {
            let norm2: BigInt = m.row(i).iter().map(|v| v * v).sum();
            norm2.bits().div_ceil(2)
        })
        .sum()
}

/// Determinant by reduction modulo enough primes and Chinese remaindering.
pub fn det_modular(m: &Matrix<BigInt>) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("determinant of a {}x{} matrix", m.rows, m.cols)));
    }
    let needed = hadamard_bits(m) + 2;
    let mut modulus = BigInt::one();
    let mut residue = BigInt::zero();
    for p in primes_below_2_31() {
        let f = PrimeField::new(p);
        let d = det_field(&f, &m.map(|v| f.from_int(v)))?;
        let pb = BigInt::from(p);
        // residue + modulus * t = d (mod p)
        let cur = f.from_int(&residue);
        let minv = f.inv(&f.from_int(&modulus))?;
        let t = f.mul(&f.sub(&d, &cur), &minv);
        residue += &modulus * BigInt::from(t);
        modulus *= pb;
        if modulus.bits() > needed {
            break;
        }
    }
    let half = &modulus >> 1;
    if residue > half {
        residue -= &modulus;
    }
    Ok(residue)
}

/// An interchangeable exact determinant algorithm for integer matrices.
pub trait DeterminantStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn det(&self, m: &Matrix<BigInt>) -> Result<BigInt>;
}

struct BareissStrategy;
struct CofactorStrategy;
struct ModularStrategy;

impl DeterminantStrategy for BareissStrategy {
    fn name(&self) -> &'static str {
        "bareiss"
    }
    fn det(&self, m: &Matrix<BigInt>) -> Result<BigInt> {
        det_bareiss(&Integers, m)
    }
}

impl DeterminantStrategy for CofactorStrategy {
    fn name(&self) -> &'static str {
        "cofactor"
    }
    fn det(&self, m: &Matrix<BigInt>) -> Result<BigInt> {
        if m.rows > 10 {
            return Err(Error::InvalidParameters("cofactor expansion is limited to size 10".into()));
        }
        det_cofactor(&Integers, m)
    }
}

impl DeterminantStrategy for ModularStrategy {
    fn name(&self) -> &'static str {
        "modular"
    }
    fn det(&self, m: &Matrix<BigInt>) -> Result<BigInt> {
        det_modular(m)
    }
}

pub fn determinant_strategies() -> Vec<Box<dyn DeterminantStrategy>> {
    vec![Box::new(BareissStrategy), Box::new(CofactorStrategy), Box::new(ModularStrategy)]
}

pub fn determinant_strategy(name: &str) -> Result<Box<dyn DeterminantStrategy>> {
    determinant_strategies()
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or_else(|| Error::Unknown { kind: "determinant method", name: name.to_string() })
}

/// Determinant of a rational matrix via its row-scaled integer form.
pub fn det_rational(m: &Matrix<BigRational>) -> Result<BigRational> {
    let scaled = clear_denominators(m);
    let mut scale = BigRational::one();
    for i in 0..m.rows {
        let l = m.row(i).iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        scale *= BigRational::from_integer(l);
    }
    let d = det_bareiss(&Integers, &scaled)?;
    Ok(BigRational::from_integer(d) / scale)
}
