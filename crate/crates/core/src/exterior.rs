//! Coefficient arrays `A ∈ Λ^k(C^N)*`, the form `F(A, x) = Σ a_I η_I`, its
//! restriction to the affine chart around `e_1 ∧ … ∧ e_k`, and the actions of
//! translations and of `GL_N`.
//!
//! Chart coordinates are stored as a `k × (N-k)` matrix `X` whose entry
//! `(p-1, t-k-1)` is `x^p_t`. Subspaces are represented by `k × N` frames whose
//! rows span them; the chart point `X` has frame `[I_k | X]`.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{det_cofactor, Matrix};
use crate::multiindex::{enumerate_indices, sort_with_sign, MultiIndex};
use crate::ring::{MultiPoly, PolyRing, Rationals, Ring};

/// Sparse skew coefficient array; only sorted keys are stored and absent keys
/// read as zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ExteriorArray<T> {
    k: usize,
    n: usize,
    coeffs: BTreeMap<MultiIndex, T>,
}

impl<T: Clone + PartialEq + Debug> ExteriorArray<T> {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidParameters(format!("need 1 <= k <= N, got k={k}, N={n}")));
        }
        Ok(ExteriorArray { k, n, coeffs: BTreeMap::new() })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check_index(&self, i: &MultiIndex) -> Result<()> {
        if i.k() != self.k || i.n() != self.n {
            return Err(Error::InvalidIndex(format!(
                "{i} does not belong to (k, N) = ({}, {})",
                self.k, self.n
            )));
        }
        Ok(())
    }

    pub fn set<R: Ring<Elem = T>>(&mut self, ring: &R, i: MultiIndex, v: T) -> Result<()> {
        self.check_index(&i)?;
        if ring.is_zero(&v) {
            self.coeffs.remove(&i);
        } else {
            self.coeffs.insert(i, v);
        }
        Ok(())
    }

    pub fn get<R: Ring<Elem = T>>(&self, ring: &R, i: &MultiIndex) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ring.zero())
    }

    /// `a` at an arbitrary tuple: the sorted coefficient times the sorting
    /// sign, zero on repeats.
    pub fn get_tuple<R: Ring<Elem = T>>(&self, ring: &R, tuple: &[usize]) -> Result<T> {
        if tuple.len() != self.k {
            return Err(Error::ArityMismatch { expected: self.k, got: tuple.len() });
        }
        let s = sort_with_sign(tuple, self.n)?;
        if s.sign == 0 {
            return Ok(ring.zero());
        }
        Ok(ring.scale_sign(&self.get(ring, &s.index), s.sign))
    }

    /// `a^{t_1…t_r}_{p_1…p_r}`: the coefficient at `I^f` with `t_i` written
    /// into position `p_i`.
    pub fn positional_get<R: Ring<Elem = T>>(&self, ring: &R, values: &[usize], positions: &[usize]) -> Result<T> {
        if values.len() != positions.len() {
            return Err(Error::ArityMismatch { expected: positions.len(), got: values.len() });
        }
        let mut tuple: Vec<usize> = (1..=self.k).collect();
        let mut used = vec![false; self.k];
        for (&t, &p) in values.iter().zip(positions) {
            if p == 0 || p > self.k {
                return Err(Error::IndexOutOfRange { value: p, n: self.k });
            }
            if t <= self.k || t > self.n {
                return Err(Error::InvalidIndex(format!("value {t} is not in [{}, {}]", self.k + 1, self.n)));
            }
            if used[p - 1] {
                return Err(Error::PositionCollision(p));
            }
            used[p - 1] = true;
            tuple[p - 1] = t;
        }
        self.get_tuple(ring, &tuple)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.coeffs.iter()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn map<U: Clone + PartialEq + Debug>(&self, f: impl Fn(&T) -> U) -> ExteriorArray<U> {
        ExteriorArray {
            k: self.k,
            n: self.n,
            coeffs: self.coeffs.iter().map(|(i, v)| (i.clone(), f(v))).collect(),
        }
    }

    /// Image of the array in another ring, dropping entries that become zero.
    pub fn lift<R: Ring>(&self, ring: &R, f: impl Fn(&T) -> Result<R::Elem>) -> Result<ExteriorArray<R::Elem>> {
        let mut out = ExteriorArray::new(self.k, self.n)?;
        for (i, v) in &self.coeffs {
            let w = f(v)?;
            if !ring.is_zero(&w) {
                out.coeffs.insert(i.clone(), w);
            }
        }
        Ok(out)
    }
}

impl ExteriorArray<BigInt> {
    pub fn to_rational(&self) -> ExteriorArray<BigRational> {
        self.map(|v| BigRational::from_integer(v.clone()))
    }
}

impl ExteriorArray<BigRational> {
    /// The integer array when every coefficient is integral.
    pub fn to_integer(&self) -> Result<ExteriorArray<BigInt>> {
        self.lift(&crate::ring::Integers, |v| {
            if v.is_integer() {
                Ok(v.to_integer())
            } else {
                Err(Error::InexactDivision)
            }
        })
    }
}

/// Uniform integer coefficients in `[lo, hi]` on every multiindex.
pub fn random_array<G: Rng>(rng: &mut G, k: usize, n: usize, lo: i64, hi: i64) -> Result<ExteriorArray<BigInt>> {
    let mut a = ExteriorArray::new(k, n)?;
    for i in enumerate_indices(k, n)? {
        let v = BigInt::from(rng.gen_range(lo..=hi));
        a.set(&crate::ring::Integers, i, v)?;
    }
    Ok(a)
}

/// Index of the chart variable `x^p_t` in row-major order.
pub fn chart_var(k: usize, n: usize, p: usize, t: usize) -> usize {
    debug_assert!((1..=k).contains(&p) && (k + 1..=n).contains(&t));
    (p - 1) * (n - k) + (t - k - 1)
}

/// Inverse of [`chart_var`]: the label `(p, t)`.
pub fn chart_label(k: usize, n: usize, idx: usize) -> (usize, usize) {
    (idx / (n - k) + 1, idx % (n - k) + k + 1)
}

/// `[I_k | X]`.
pub fn chart_frame<R: Ring>(ring: &R, x: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let k = x.rows();
    Matrix::from_fn(k, k + x.cols(), |i, j| {
        if j < k {
            if i == j {
                ring.one()
            } else {
                ring.zero()
            }
        } else {
            x.get(i, j - k).clone()
        }
    })
}

/// Frame `[X | I_k]` of the chart around `e_{N-k+1} ∧ … ∧ e_N`.
pub fn dual_chart_point<R: Ring>(ring: &R, x: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let k = x.rows();
    let m = x.cols();
    Matrix::from_fn(k, k + m, |i, j| {
        if j < m {
            x.get(i, j).clone()
        } else if j - m == i {
            ring.one()
        } else {
            ring.zero()
        }
    })
}

/// The chart point with every coordinate a distinct variable of
/// `Q[x^1_{k+1}, …, x^k_N]`.
pub fn symbolic_chart(k: usize, n: usize) -> Matrix<MultiPoly> {
    let nv = k * (n - k);
    Matrix::from_fn(k, n - k, |i, j| MultiPoly::var(nv, i * (n - k) + j))
}

pub fn zero_chart<R: Ring>(ring: &R, k: usize, n: usize) -> Matrix<R::Elem> {
    Matrix::filled(k, n - k, ring.zero())
}

/// `η_I`: the maximal minor of a frame with columns `I`.
pub fn frame_minor<R: Ring>(ring: &R, frame: &Matrix<R::Elem>, i: &MultiIndex) -> R::Elem {
    let rows: Vec<usize> = (0..frame.rows()).collect();
    let cols: Vec<usize> = i.values().iter().map(|v| v - 1).collect();
    det_cofactor(ring, &frame.submatrix(&rows, &cols)).expect("square minor")
}

/// `η_I` at the chart point `X`.
pub fn plucker_minor<R: Ring>(ring: &R, x: &Matrix<R::Elem>, i: &MultiIndex) -> R::Elem {
    frame_minor(ring, &chart_frame(ring, x), i)
}

/// `F(A, frame) = Σ a_I η_I(frame)`.
pub fn evaluate_frame<R: Ring>(ring: &R, a: &ExteriorArray<R::Elem>, frame: &Matrix<R::Elem>) -> Result<R::Elem> {
    if frame.rows() != a.k || frame.cols() != a.n {
        return Err(Error::Dimension(format!(
            "frame is {}x{}, expected {}x{}",
            frame.rows(),
            frame.cols(),
            a.k,
            a.n
        )));
    }
    let mut acc = ring.zero();
    for (i, c) in a.entries() {
        acc = ring.add(&acc, &ring.mul(c, &frame_minor(ring, frame, i)));
    }
    Ok(acc)
}

pub fn evaluate_form<R: Ring>(ring: &R, a: &ExteriorArray<R::Elem>, x: &Matrix<R::Elem>) -> Result<R::Elem> {
    evaluate_frame(ring, a, &chart_frame(ring, x))
}

/// `F(A, ·)` on the chart as a polynomial in the `k(N-k)` variables `x^p_t`.
pub fn dehomogenized_polynomial(a: &ExteriorArray<BigRational>) -> Result<MultiPoly> {
    let ring = PolyRing::new(a.k * (a.n - a.k));
    let lifted = a.lift(&ring, |c| ring.from_rational(c))?;
    evaluate_form(&ring, &lifted, &symbolic_chart(a.k, a.n))
}

fn flatten<T: Clone>(x: &Matrix<T>) -> Vec<T> {
    x.to_rows().into_iter().flatten().collect()
}

fn check_chart<T: Clone>(a_k: usize, a_n: usize, x: &Matrix<T>) -> Result<()> {
    if x.rows() != a_k || x.cols() != a_n - a_k {
        return Err(Error::Dimension(format!(
            "chart point is {}x{}, expected {}x{}",
            x.rows(),
            x.cols(),
            a_k,
            a_n - a_k
        )));
    }
    Ok(())
}

/// All first partials `∂F/∂x^p_t` at `X`, as a `k × (N-k)` array.
pub fn gradient<R: Ring>(ring: &R, a: &ExteriorArray<BigRational>, x: &Matrix<R::Elem>) -> Result<Matrix<R::Elem>> {
    check_chart(a.k, a.n, x)?;
    let f = dehomogenized_polynomial(a)?;
    let pt = flatten(x);
    let vals = (0..f.nvars())
        .map(|v| f.derivative(v).eval(ring, &pt))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_fn(a.k, a.n - a.k, |i, j| vals[i * (a.n - a.k) + j].clone()))
}

/// `F(A, X) = 0` and every first partial vanishes at `X`.
pub fn is_critical<R: Ring>(ring: &R, a: &ExteriorArray<BigRational>, x: &Matrix<R::Elem>) -> Result<bool> {
    check_chart(a.k, a.n, x)?;
    let f = dehomogenized_polynomial(a)?;
    let pt = flatten(x);
    if !ring.is_zero(&f.eval(ring, &pt)?) {
        return Ok(false);
    }
    for v in 0..f.nvars() {
        if !ring.is_zero(&f.derivative(v).eval(ring, &pt)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `a_I = 0` for every `I` in the star of `J`.
pub fn nabla_membership<T: Clone + PartialEq + Debug, R: Ring<Elem = T>>(
    ring: &R,
    a: &ExteriorArray<T>,
    j: &MultiIndex,
) -> bool {
    j.star().iter().all(|i| ring.is_zero(&a.get(ring, i)))
}

/// Splits `J` into positional form relative to `I^f`: the positions of
/// `I^f \ J` and the values of `J \ I^f`, both ascending.
pub fn positional_form(j: &MultiIndex) -> (Vec<usize>, Vec<usize>) {
    let k = j.k();
    let positions: Vec<usize> = (1..=k).filter(|p| !j.contains(*p)).collect();
    let values: Vec<usize> = j.values().iter().copied().filter(|&v| v > k).collect();
    (positions, values)
}

/// The translated array `A·X`: its positional coefficients are the iterated
/// partials of `F(A, ·)` at `X`.
pub fn act_translation(a: &ExteriorArray<BigRational>, x: &Matrix<BigRational>) -> Result<ExteriorArray<BigRational>> {
    check_chart(a.k, a.n, x)?;
    let (k, n) = (a.k, a.n);
    let f = dehomogenized_polynomial(a)?;
    let pt = flatten(x);
    let mut out = ExteriorArray::new(k, n)?;
    for j in enumerate_indices(k, n)? {
        let (positions, values) = positional_form(&j);
        let mut d = f.clone();
        for (&p, &t) in positions.iter().zip(&values) {
            d = d.derivative(chart_var(k, n, p, t));
        }
        let v = d.eval(&Rationals, &pt)?;
        // d is a^{values}_{positions}; undo the placement sign to get a_J
        let mut tuple: Vec<usize> = (1..=k).collect();
        for (&p, &t) in positions.iter().zip(&values) {
            tuple[p - 1] = t;
        }
        let sign = sort_with_sign(&tuple, n)?.sign;
        out.set(&Rationals, j, Rationals.scale_sign(&v, sign))?;
    }
    Ok(out)
}

/// `(A·g)_J = Σ_I a_I · det g[I, J]`, so that `F(A·g, frame) = F(A, frame·gᵀ)`.
pub fn act_gl<R: Ring>(ring: &R, a: &ExteriorArray<R::Elem>, g: &Matrix<R::Elem>) -> Result<ExteriorArray<R::Elem>> {
    if g.rows() != a.n || g.cols() != a.n {
        return Err(Error::Dimension(format!("group element must be {0}x{0}", a.n)));
    }
    let mut out = ExteriorArray::new(a.k, a.n)?;
    for j in enumerate_indices(a.k, a.n)? {
        let cols: Vec<usize> = j.values().iter().map(|v| v - 1).collect();
        let mut acc = ring.zero();
        for (i, c) in a.entries() {
            let rows: Vec<usize> = i.values().iter().map(|v| v - 1).collect();
            let minor = det_cofactor(ring, &g.submatrix(&rows, &cols))?;
            if !ring.is_zero(&minor) {
                acc = ring.add(&acc, &ring.mul(c, &minor));
            }
        }
        out.set(ring, j, acc)?;
    }
    Ok(out)
}

/// The element `g_X` with `[I_k | 0]·g_Xᵀ = [I_k | X]`, so that translating
/// by `X` equals acting by `g_X`.
pub fn translation_matrix<R: Ring>(ring: &R, x: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let (k, m) = (x.rows(), x.cols());
    let n = k + m;
    Matrix::from_fn(n, n, |i, j| {
        if i == j {
            ring.one()
        } else if i >= k && j < k {
            x.get(j, i - k).clone()
        } else {
            ring.zero()
        }
    })
}

/// The permutation matrix `w` carrying the chart around `e_1 ∧ … ∧ e_k` to
/// the chart around `e_{N-k+1} ∧ … ∧ e_N`: `[I_k | X]·wᵀ = [X | I_k]`.
pub fn dual_swap<R: Ring>(ring: &R, k: usize, n: usize) -> Matrix<R::Elem> {
    let target = |i: usize| if i < k { i + n - k } else { i - k };
    Matrix::from_fn(n, n, |r, c| if target(c) == r { ring.one() } else { ring.zero() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Integers;
    use num_traits::{One, Zero};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mi(v: &[usize], n: usize) -> MultiIndex {
        MultiIndex::new(v.to_vec(), n).unwrap()
    }

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn unit(k: usize, n: usize, i: &[usize]) -> ExteriorArray<BigRational> {
        let mut a = ExteriorArray::new(k, n).unwrap();
        a.set(&Rationals, mi(i, n), q(1)).unwrap();
        a
    }

    #[test]
    fn positional_access() {
        let mut a = ExteriorArray::new(3, 6).unwrap();
        a.set(&Integers, mi(&[1, 4, 5], 6), BigInt::from(7)).unwrap();
        assert_eq!(a.positional_get(&Integers, &[4, 5], &[2, 3]).unwrap(), BigInt::from(7));
        assert_eq!(a.positional_get(&Integers, &[5, 4], &[2, 3]).unwrap(), BigInt::from(-7));
        assert_eq!(a.positional_get(&Integers, &[4, 5], &[3, 2]).unwrap(), BigInt::from(-7));
        assert_eq!(a.positional_get(&Integers, &[4, 4], &[2, 3]).unwrap(), BigInt::zero());
        assert_eq!(a.positional_get(&Integers, &[4, 5], &[2, 2]), Err(Error::PositionCollision(2)));
        assert_eq!(a.positional_get(&Integers, &[], &[]).unwrap(), BigInt::zero());
    }

    #[test]
    fn minors_on_the_chart() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Matrix::from_fn(3, 4, |_, _| BigInt::from(rng.gen_range(-5..6)));
        assert_eq!(plucker_minor(&Integers, &x, &MultiIndex::first(3, 7)), BigInt::one());
        // (1, 2, t): the last row entry of column t
        for t in 4..=7 {
            assert_eq!(plucker_minor(&Integers, &x, &mi(&[1, 2, t], 7)), x.get(2, t - 4).clone());
        }
        let z = zero_chart(&Integers, 3, 6);
        assert!(plucker_minor(&Integers, &z, &mi(&[1, 2, 4], 6)).is_zero());
    }

    #[test]
    fn simple_forms() {
        let x = zero_chart(&Rationals, 3, 6);
        assert_eq!(evaluate_form(&Rationals, &unit(3, 6, &[1, 2, 3]), &x).unwrap(), q(1));
        assert!(evaluate_form(&Rationals, &unit(3, 6, &[4, 5, 6]), &x).unwrap().is_zero());
        let f = dehomogenized_polynomial(&unit(3, 6, &[1, 2, 6])).unwrap();
        assert_eq!(f, MultiPoly::var(9, chart_var(3, 6, 3, 6)));
        let dual = dual_chart_point(&Rationals, &x);
        let mut a = unit(3, 6, &[4, 5, 6]);
        a.set(&Rationals, mi(&[1, 2, 3], 6), q(5)).unwrap();
        assert_eq!(evaluate_frame(&Rationals, &a, &dual).unwrap(), q(1));
    }

    #[test]
    fn gradient_of_linear_terms() {
        let mut a = ExteriorArray::new(3, 6).unwrap();
        a.set(&Rationals, mi(&[1, 3, 4], 6), q(2)).unwrap();
        a.set(&Rationals, mi(&[1, 2, 3], 6), q(9)).unwrap();
        let g = gradient(&Rationals, &a, &zero_chart(&Rationals, 3, 6)).unwrap();
        // a_{134} = a^4_2 up to the sign of sorting (1,4,3)
        assert_eq!(g.get(1, 0).clone(), q(-2));
        let expected = a.positional_get(&Rationals, &[4], &[2]).unwrap();
        assert_eq!(g.get(1, 0).clone(), expected);
        assert!(!is_critical(&Rationals, &a, &zero_chart(&Rationals, 3, 6)).unwrap());
    }

    #[test]
    fn zero_translation_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_array(&mut rng, 3, 6, -3, 3).unwrap().to_rational();
        let b = act_translation(&a, &zero_chart(&Rationals, 3, 6)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn permutation_action_permutes_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_array(&mut rng, 2, 4, -4, 4).unwrap();
        // transposition of 1 and 3
        let g = Matrix::from_fn(4, 4, |i, j| {
            let s = |v: usize| match v {
                0 => 2,
                2 => 0,
                v => v,
            };
            if s(i) == j { BigInt::one() } else { BigInt::zero() }
        });
        let b = act_gl(&Integers, &a, &g).unwrap();
        for j in enumerate_indices(2, 4).unwrap() {
            let s = |v: usize| match v {
                1 => 3,
                3 => 1,
                v => v,
            };
            let image: Vec<usize> = j.values().iter().map(|&v| s(v)).collect();
            assert_eq!(b.get(&Integers, &j), a.get_tuple(&Integers, &image).unwrap(), "{j}");
        }
        assert_eq!(act_gl(&Integers, &a, &crate::linalg::identity(&Integers, 4)).unwrap(), a);
    }
}
