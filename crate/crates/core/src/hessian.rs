//! The Hessian `H_{k,N}` of the dehomogenized form at the chart origin, its
//! block structure, the duality reordering and the specialization embeddings.
//!
//! Rows and columns are labelled by `(p, t)` with `p ∈ [1, k]` and
//! `t ∈ [k+1, N]`, grouped into `k` blocks of size `N-k` (see
//! [`chart_var`]).

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exterior::{act_gl, chart_label, chart_var, dehomogenized_polynomial, dual_swap, ExteriorArray};
use crate::linalg::{rank_exact, Matrix};
use crate::multiindex::{sort_with_sign, MultiIndex};
use crate::ring::{MultiPoly, PolyRing, Rationals, Ring};

#[derive(Clone, PartialEq)]
pub struct HessianMatrix<T> {
    k: usize,
    n: usize,
    m: Matrix<T>,
}

impl<T: std::fmt::Display> Debug for HessianMatrix<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "H_{{{},{}}} {:?}", self.k, self.n, self.m)
    }
}

impl<T: Clone + PartialEq + Debug> HessianMatrix<T> {
    pub fn from_matrix(k: usize, n: usize, m: Matrix<T>) -> Result<Self> {
        let side = k * (n - k);
        if m.rows() != side || m.cols() != side {
            return Err(Error::Dimension(format!(
                "H_{{{k},{n}}} must be {side}x{side}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(HessianMatrix { k, n, m })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> usize {
        self.m.rows()
    }

    pub fn block_size(&self) -> usize {
        self.n - self.k
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.m
    }

    pub fn label(&self, idx: usize) -> (usize, usize) {
        chart_label(self.k, self.n, idx)
    }

    pub fn entry(&self, p: usize, t: usize, p2: usize, t2: usize) -> &T {
        self.m.get(chart_var(self.k, self.n, p, t), chart_var(self.k, self.n, p2, t2))
    }

    /// Block `(i, j)` (1-based), of size `(N-k) × (N-k)`.
    pub fn block(&self, i: usize, j: usize) -> Matrix<T> {
        let s = self.block_size();
        let rows: Vec<usize> = ((i - 1) * s..i * s).collect();
        let cols: Vec<usize> = ((j - 1) * s..j * s).collect();
        self.m.submatrix(&rows, &cols)
    }

    pub fn map<U: Clone + PartialEq + Debug>(&self, f: impl Fn(&T) -> U) -> HessianMatrix<U> {
        HessianMatrix { k: self.k, n: self.n, m: self.m.map(f) }
    }

    /// Symmetry, zero diagonal blocks and skew off-diagonal blocks; the error
    /// names the first offending entry.
    pub fn check_structure<R: Ring<Elem = T>>(&self, ring: &R) -> std::result::Result<(), String> {
        let side = self.side();
        for r in 0..side {
            for c in 0..side {
                let (p, t) = self.label(r);
                let (p2, t2) = self.label(c);
                let v = self.m.get(r, c);
                if v != self.m.get(c, r) {
                    return Err(format!("not symmetric at ({p},{t}),({p2},{t2})"));
                }
                if p == p2 && !ring.is_zero(v) {
                    return Err(format!("diagonal block {p} nonzero at t={t}, t'={t2}"));
                }
                let mirror = self.m.get(chart_var(self.k, self.n, p, t2), chart_var(self.k, self.n, p2, t));
                if *v != ring.neg(mirror) {
                    return Err(format!("block ({p},{p2}) not skew at ({t},{t2})"));
                }
            }
        }
        Ok(())
    }

    /// Zeroes block `(i, j)` and its transpose partner.
    pub fn zero_block<R: Ring<Elem = T>>(&mut self, ring: &R, i: usize, j: usize) {
        let s = self.block_size();
        for a in 0..s {
            for b in 0..s {
                self.m.set((i - 1) * s + a, (j - 1) * s + b, ring.zero());
                self.m.set((j - 1) * s + a, (i - 1) * s + b, ring.zero());
            }
        }
    }

    /// Builds `H` from its upper blocks `A_ij` (`i < j`), filling block
    /// `(j, i)` with `-A_ij` and the diagonal with zeros.
    pub fn from_upper_blocks<R: Ring<Elem = T>>(
        ring: &R,
        k: usize,
        n: usize,
        blocks: &BTreeMap<(usize, usize), Matrix<T>>,
    ) -> Result<Self> {
        let s = n - k;
        let mut m = Matrix::filled(k * s, k * s, ring.zero());
        for (&(i, j), b) in blocks {
            if !(1 <= i && i < j && j <= k) {
                return Err(Error::InvalidParameters(format!("block A{i}{j} is not an upper block for k={k}")));
            }
            if b.rows() != s || b.cols() != s {
                return Err(Error::Dimension(format!("block A{i}{j} must be {s}x{s}, got {}x{}", b.rows(), b.cols())));
            }
            for a in 0..s {
                for c in 0..s {
                    m.set((i - 1) * s + a, (j - 1) * s + c, b.get(a, c).clone());
                    m.set((j - 1) * s + a, (i - 1) * s + c, ring.neg(b.get(a, c)));
                }
            }
        }
        HessianMatrix::from_matrix(k, n, m)
    }
}

/// `H(A)` at the chart origin: entry `((p,t),(p',t'))` is `a^{tt'}_{pp'}` off
/// the diagonal blocks and zero on them.
pub fn assemble<R: Ring>(ring: &R, a: &ExteriorArray<R::Elem>) -> Result<HessianMatrix<R::Elem>> {
    let (k, n) = (a.k(), a.n());
    if n <= k {
        return Err(Error::InvalidParameters(format!("Hessian needs N > k, got k={k}, N={n}")));
    }
    let side = k * (n - k);
    let mut m = Matrix::filled(side, side, ring.zero());
    for r in 0..side {
        let (p, t) = chart_label(k, n, r);
        for c in 0..side {
            let (p2, t2) = chart_label(k, n, c);
            if p == p2 || t == t2 {
                continue;
            }
            m.set(r, c, a.positional_get(ring, &[t, t2], &[p, p2])?);
        }
    }
    HessianMatrix::from_matrix(k, n, m)
}

/// Second partials of `F(A, ·)` at an arbitrary chart point `X`.
pub fn hessian_at(a: &ExteriorArray<BigRational>, x: &Matrix<BigRational>) -> Result<HessianMatrix<BigRational>> {
    let (k, n) = (a.k(), a.n());
    let f = dehomogenized_polynomial(a)?;
    let pt: Vec<BigRational> = x.to_rows().into_iter().flatten().collect();
    if pt.len() != f.nvars() {
        return Err(Error::ArityMismatch { expected: f.nvars(), got: pt.len() });
    }
    let side = f.nvars();
    let firsts: Vec<MultiPoly> = (0..side).map(|v| f.derivative(v)).collect();
    let mut m = Matrix::filled(side, side, Rationals.zero());
    for r in 0..side {
        for c in r..side {
            let v = firsts[r].derivative(c).eval(&Rationals, &pt)?;
            m.set(r, c, v.clone());
            m.set(c, r, v);
        }
    }
    HessianMatrix::from_matrix(k, n, m)
}

/// The independent coefficients of `H_{k,N}`: the indices `I` with
/// `|I ∩ I^f| = k-2`, in the order `(p, p', t, t')` with `p < p'`, `t < t'`,
/// each named `a_p_p'_t_t'`.
pub fn symbolic_variables(k: usize, n: usize) -> Vec<(MultiIndex, String)> {
    let mut out = Vec::new();
    for p in 1..=k {
        for p2 in p + 1..=k {
            for t in k + 1..=n {
                for t2 in t + 1..=n {
                    let mut vals: Vec<usize> = (1..=k).filter(|&v| v != p && v != p2).collect();
                    vals.push(t);
                    vals.push(t2);
                    let idx = sort_with_sign(&vals, n).expect("in range").index;
                    out.push((idx, format!("a_{p}_{p2}_{t}_{t2}")));
                }
            }
        }
    }
    out
}

/// The array whose coefficient at each independent index is its own variable.
pub fn symbolic_array(k: usize, n: usize) -> Result<(ExteriorArray<MultiPoly>, Vec<String>)> {
    let vars = symbolic_variables(k, n);
    let ring = PolyRing::new(vars.len());
    let mut a = ExteriorArray::new(k, n)?;
    for (v, (idx, _)) in vars.iter().enumerate() {
        a.set(&ring, idx.clone(), ring.var(v))?;
    }
    Ok((a, vars.into_iter().map(|(_, s)| s).collect()))
}

/// `H_{k,N}` with one variable per independent entry; returns the variable names.
pub fn assemble_symbolic(k: usize, n: usize) -> Result<(HessianMatrix<MultiPoly>, Vec<String>)> {
    let (a, names) = symbolic_array(k, n)?;
    let ring = PolyRing::new(names.len());
    Ok((assemble(&ring, &a)?, names))
}

/// The coefficients `a_I` with `|I ∩ I^f| = k-2` read off a Hessian; every
/// other coefficient is zero. Fails unless assembling the result gives back
/// `h`, so the input must have the full Hessian structure.
pub fn array_from_hessian<R: Ring>(ring: &R, h: &HessianMatrix<R::Elem>) -> Result<ExteriorArray<R::Elem>> {
    let (k, n) = (h.k(), h.n());
    let mut a = ExteriorArray::new(k, n)?;
    for p in 1..=k {
        for p2 in p + 1..=k {
            for t in k + 1..=n {
                for t2 in t + 1..=n {
                    let mut tuple: Vec<usize> = (1..=k).collect();
                    tuple[p - 1] = t;
                    tuple[p2 - 1] = t2;
                    let s = sort_with_sign(&tuple, n)?;
                    let v = h.entry(p, t, p2, t2).clone();
                    a.set(ring, s.index, ring.scale_sign(&v, s.sign))?;
                }
            }
        }
    }
    let back = assemble(ring, &a)?;
    if let Some(idx) = (0..h.side() * h.side()).find(|&i| back.matrix().get(i / h.side(), i % h.side()) != h.matrix().get(i / h.side(), i % h.side())) {
        let (r, c) = (idx / h.side(), idx % h.side());
        return Err(Error::InvalidParameters(format!(
            "not a Hessian: entry ({}, {}) is inconsistent with the upper blocks",
            r + 1,
            c + 1
        )));
    }
    Ok(a)
}

/// `H(x')`: the Hessian at `e_{N-k+1} ∧ … ∧ e_N` in the coordinates of the
/// chart `[X | I_k]`.
pub fn assemble_dual<R: Ring>(ring: &R, a: &ExteriorArray<R::Elem>) -> Result<HessianMatrix<R::Elem>> {
    let w = dual_swap(ring, a.k(), a.n());
    assemble(ring, &act_gl(ring, a, &w)?)
}

/// Rank of block row `i` (height `N-k`, full width).
pub fn block_row_rank(h: &HessianMatrix<BigInt>, i: usize) -> usize {
    let s = h.block_size();
    let rows: Vec<usize> = ((i - 1) * s..i * s).collect();
    let cols: Vec<usize> = (0..h.side()).collect();
    rank_exact(&h.matrix().submatrix(&rows, &cols))
}

/// Ranks of the consecutive row strips of height `k` (full width); the
/// alternative reading of "row block" with `N-k` strips of `k` rows.
pub fn strip_row_ranks(h: &HessianMatrix<BigInt>) -> Vec<usize> {
    let k = h.k();
    (0..h.block_size())
        .map(|s| {
            let rows: Vec<usize> = (s * k..(s + 1) * k).collect();
            let cols: Vec<usize> = (0..h.side()).collect();
            rank_exact(&h.matrix().submatrix(&rows, &cols))
        })
        .collect()
}

/// The 1-based reordering `[1, N-k+1, 2(N-k)+1, …], [2, N-k+2, …], …`.
pub fn duality_permutation(k: usize, n: usize) -> Vec<usize> {
    let s = n - k;
    let mut out = Vec::with_capacity(k * s);
    for j in 0..s {
        for p in 0..k {
            out.push(p * s + j + 1);
        }
    }
    out
}

/// `H` with rows and columns reordered by [`duality_permutation`], relabelled
/// as an `(N-k, N)` Hessian.
pub fn apply_duality<T: Clone + PartialEq + Debug>(h: &HessianMatrix<T>) -> HessianMatrix<T> {
    let perm: Vec<usize> = duality_permutation(h.k, h.n).into_iter().map(|v| v - 1).collect();
    HessianMatrix { k: h.n - h.k, n: h.n, m: h.m.permute_symmetric(&perm) }
}

/// A signed variable correspondence `v ↦ sign · w` carrying symbolic
/// `H_{k,N}` after the duality reordering onto symbolic `H_{N-k,N}` entrywise.
pub fn dual_variable_map(k: usize, n: usize) -> Result<Vec<(usize, i8)>> {
    let (h, names) = assemble_symbolic(k, n)?;
    let (target, tnames) = assemble_symbolic(n - k, n)?;
    if names.len() != tnames.len() {
        return Err(Error::Inconsistent(format!("{} vs {} variables", names.len(), tnames.len())));
    }
    let permuted = apply_duality(&h);
    let mut map: Vec<Option<(usize, i8)>> = vec![None; names.len()];
    let side = h.side();
    for r in 0..side {
        for c in 0..side {
            let a = signed_variable(permuted.matrix().get(r, c))?;
            let b = signed_variable(target.matrix().get(r, c))?;
            match (a, b) {
                (None, None) => {}
                (Some((va, sa)), Some((vb, sb))) => {
                    let want = (vb, sa * sb);
                    match map[va] {
                        None => map[va] = Some(want),
                        Some(prev) if prev == want => {}
                        Some(_) => {
                            return Err(Error::Inconsistent(format!("variable {} maps inconsistently", names[va])))
                        }
                    }
                }
                _ => return Err(Error::Inconsistent(format!("zero pattern differs at ({r},{c})"))),
            }
        }
    }
    let out: Vec<(usize, i8)> = map
        .into_iter()
        .enumerate()
        .map(|(v, m)| m.ok_or_else(|| Error::Inconsistent(format!("variable {} unused", names[v]))))
        .collect::<Result<_>>()?;
    let mut seen: Vec<usize> = out.iter().map(|&(w, _)| w).collect();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != out.len() {
        return Err(Error::Inconsistent("variable correspondence is not injective".into()));
    }
    Ok(out)
}

fn signed_variable(p: &MultiPoly) -> Result<Option<(usize, i8)>> {
    if p.is_zero() {
        return Ok(None);
    }
    let bad = || Error::Inconsistent(format!("entry {p} is not a signed variable"));
    if p.num_terms() != 1 {
        return Err(bad());
    }
    let (m, c) = p.leading_term().unwrap();
    let var = m.exps().iter().position(|&e| e == 1).ok_or_else(bad)?;
    if m.degree() != 1 {
        return Err(bad());
    }
    let one = BigRational::from_integer(1.into());
    if *c == one {
        Ok(Some((var, 1)))
    } else if *c == -one {
        Ok(Some((var, -1)))
    } else {
        Err(bad())
    }
}

/// The `(N-k, N)` array whose Hessian is the duality reordering of `H(A)`.
pub fn dual_array<R: Ring>(ring: &R, a: &ExteriorArray<R::Elem>) -> Result<ExteriorArray<R::Elem>> {
    let (k, n) = (a.k(), a.n());
    let map = dual_variable_map(k, n)?;
    let src = symbolic_variables(k, n);
    let dst = symbolic_variables(n - k, n);
    let mut out = ExteriorArray::new(n - k, n)?;
    for (v, &(w, sign)) in map.iter().enumerate() {
        let val = ring.scale_sign(&a.get(ring, &src[v].0), sign);
        out.set(ring, dst[w].0.clone(), val)?;
    }
    Ok(out)
}

fn block_diagonal_split<R: Ring>(ring: &R, s1: &Matrix<R::Elem>, s2: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let (a, b) = (s1.rows(), s2.rows());
    Matrix::from_fn(a + b, a + b, |i, j| {
        if i < a && j < a {
            s1.get(i, j).clone()
        } else if i >= a && j >= a {
            s2.get(i - a, j - a).clone()
        } else {
            ring.zero()
        }
    })
}

/// Value-split specialization: every block `A_ij` of the result is
/// `[[S1, 0], [0, S2]]` with `S1`, `S2` the corresponding blocks of `H1`, `H2`.
pub fn specialize_embed<R: Ring>(
    ring: &R,
    h1: &HessianMatrix<R::Elem>,
    h2: &HessianMatrix<R::Elem>,
) -> Result<HessianMatrix<R::Elem>> {
    if h1.k != h2.k {
        return Err(Error::InvalidParameters(format!("position counts differ: {} vs {}", h1.k, h2.k)));
    }
    let k = h1.k;
    let n = h1.n + h2.n - k;
    let s = n - k;
    let mut m = Matrix::filled(k * s, k * s, ring.zero());
    for i in 1..=k {
        for j in 1..=k {
            let b = block_diagonal_split(ring, &h1.block(i, j), &h2.block(i, j));
            for x in 0..s {
                for y in 0..s {
                    m.set((i - 1) * s + x, (j - 1) * s + y, b.get(x, y).clone());
                }
            }
        }
    }
    HessianMatrix::from_matrix(k, n, m)
}

/// Position-split specialization: `H_{k1,k1+s} ⊕ H_{k2,k2+s} ↪ H_{k1+k2,k1+k2+s}`
/// with every block between the two position groups zero.
pub fn position_embed<R: Ring>(
    ring: &R,
    h1: &HessianMatrix<R::Elem>,
    h2: &HessianMatrix<R::Elem>,
) -> Result<HessianMatrix<R::Elem>> {
    if h1.block_size() != h2.block_size() {
        return Err(Error::InvalidParameters(format!(
            "block sizes differ: {} vs {}",
            h1.block_size(),
            h2.block_size()
        )));
    }
    let k = h1.k + h2.k;
    let n = k + h1.block_size();
    HessianMatrix::from_matrix(k, n, block_diagonal_split(ring, &h1.m, &h2.m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::random_array;
    use crate::ring::Integers;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn symbolic_counts() {
        let (h, names) = assemble_symbolic(3, 6).unwrap();
        assert_eq!((h.side(), names.len()), (9, 9));
        let (h, names) = assemble_symbolic(2, 4).unwrap();
        assert_eq!((h.side(), names.len()), (4, 1));
        assert_eq!(symbolic_variables(4, 9).len(), 6 * 10);
        h.check_structure(&PolyRing::new(1)).unwrap();
    }

    #[test]
    fn example_entry_sign() {
        // entry ((1,5),(2,4)) is -a_{345}
        let (h, names) = assemble_symbolic(3, 6).unwrap();
        let v = names.iter().position(|s| s == "a_1_2_4_5").unwrap();
        assert_eq!(*h.entry(1, 5, 2, 4), MultiPoly::var(9, v).neg());
    }

    #[test]
    fn duality_orders() {
        assert_eq!(duality_permutation(3, 7), vec![1, 5, 9, 2, 6, 10, 3, 7, 11, 4, 8, 12]);
        assert_eq!(duality_permutation(2, 4), vec![1, 3, 2, 4]);
        let p = duality_permutation(3, 7);
        let q = duality_permutation(4, 7);
        let composed: Vec<usize> = (0..12).map(|i| p[q[i] - 1]).collect();
        assert_eq!(composed, (1..=12).collect::<Vec<_>>());
    }

    #[test]
    fn random_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_array(&mut rng, 4, 8, -5, 5).unwrap();
        let h = assemble(&Integers, &a).unwrap();
        h.check_structure(&Integers).unwrap();
        assemble_dual(&Integers, &a).unwrap().check_structure(&Integers).unwrap();
        let z = ExteriorArray::<BigInt>::new(3, 7).unwrap();
        assert!(assemble(&Integers, &z).unwrap().matrix().to_rows().iter().flatten().all(|v| *v == BigInt::from(0)));
    }
}
