//! Multiindices of Plücker coordinates and the combinatorics around them:
//! sorting signs, stars, the distinguished sets `I^f = {1..k}` and
//! `I^l = {N-k+1..N}`, and the replacement pairing used for node points.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A strictly increasing `k`-tuple of integers in `[1, N]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MultiIndex {
    values: Vec<usize>,
    n: usize,
}

impl MultiIndex {
    pub fn new(values: Vec<usize>, n: usize) -> Result<Self> {
        for &v in &values {
            if v == 0 || v > n {
                return Err(Error::IndexOutOfRange { value: v, n });
            }
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidIndex(format!(
                "{values:?} is not strictly increasing"
            )));
        }
        Ok(MultiIndex { values, n })
    }

    pub(crate) fn new_unchecked(values: Vec<usize>, n: usize) -> Self {
        debug_assert!(MultiIndex::new(values.clone(), n).is_ok());
        MultiIndex { values, n }
    }

    /// `I^f = (1, ..., k)`.
    pub fn first(k: usize, n: usize) -> Self {
        MultiIndex::new_unchecked((1..=k).collect(), n)
    }

    /// `I^l = (N-k+1, ..., N)`.
    pub fn last(k: usize, n: usize) -> Self {
        MultiIndex::new_unchecked((n - k + 1..=n).collect(), n)
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, v: usize) -> bool {
        self.values.binary_search(&v).is_ok()
    }

    pub fn intersection_len(&self, other: &MultiIndex) -> usize {
        self.values.iter().filter(|v| other.contains(**v)).count()
    }

    /// Every multiindex that differs from `self` in at most one position,
    /// `self` included, in lexicographic order.
    pub fn star(&self) -> Vec<MultiIndex> {
        let mut out = vec![self.clone()];
        for pos in 0..self.k() {
            for v in 1..=self.n {
                if self.contains(v) {
                    continue;
                }
                let mut vals = self.values.clone();
                vals[pos] = v;
                vals.sort_unstable();
                out.push(MultiIndex::new_unchecked(vals, self.n));
            }
        }
        out.sort();
        out
    }

    /// Number of positions in which two indices of equal arity differ as sets.
    pub fn distance(&self, other: &MultiIndex) -> usize {
        self.k() - self.intersection_len(other)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(s)
    }
}

/// A multiindex together with the sign picked up while sorting an arbitrary
/// tuple into it. Sign 0 marks a tuple with a repeated entry; the index is
/// then `I^f` and carries no meaning.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SignedIndex {
    pub index: MultiIndex,
    pub sign: i8,
}

/// Sorts `tuple` and returns the sign `(-1)^(transpositions)`.
pub fn sort_with_sign(tuple: &[usize], n: usize) -> Result<SignedIndex> {
    for &v in tuple {
        if v == 0 || v > n {
            return Err(Error::IndexOutOfRange { value: v, n });
        }
    }
    let mut vals = tuple.to_vec();
    let mut sign = 1i8;
    // insertion sort; each adjacent swap is one transposition
    for i in 1..vals.len() {
        let mut j = i;
        while j > 0 && vals[j - 1] > vals[j] {
            vals.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if vals.windows(2).any(|w| w[0] == w[1]) {
        return Ok(SignedIndex {
            index: MultiIndex::first(tuple.len(), n),
            sign: 0,
        });
    }
    Ok(SignedIndex {
        index: MultiIndex::new_unchecked(vals, n),
        sign,
    })
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All `C(N, k)` multiindices in lexicographic order. This order is the
/// canonical serialization order for arrays.
pub fn enumerate_indices(k: usize, n: usize) -> Result<Vec<MultiIndex>> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameters(format!(
            "need 1 <= k <= N, got k={k}, N={n}"
        )));
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut cur: Vec<usize> = (1..=k).collect();
    loop {
        out.push(MultiIndex::new_unchecked(cur.clone(), n));
        // advance to the next combination
        let mut i = k;
        while i > 0 && cur[i - 1] == n - k + i {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
    Ok(out)
}

/// `J ⊆ I^f ∪ I^l` with `|J| = k`, for `N >= 2k`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NodeIndexSet {
    j: MultiIndex,
}

impl NodeIndexSet {
    pub fn new(j: MultiIndex) -> Result<Self> {
        let (k, n) = (j.k(), j.n());
        if n < 2 * k {
            return Err(Error::InvalidParameters(format!(
                "node index sets need N >= 2k, got k={k}, N={n}"
            )));
        }
        if let Some(v) = j.values().iter().find(|&&v| v > k && v <= n - k) {
            return Err(Error::InvalidIndex(format!(
                "{v} lies outside I^f ∪ I^l for (k, N) = ({k}, {n})"
            )));
        }
        Ok(NodeIndexSet { j })
    }

    pub fn from_values(values: &[usize], n: usize) -> Result<Self> {
        let mut v = values.to_vec();
        v.sort_unstable();
        NodeIndexSet::new(MultiIndex::new(v, n)?)
    }

    pub fn j(&self) -> &MultiIndex {
        &self.j
    }

    pub fn k(&self) -> usize {
        self.j.k()
    }

    pub fn n(&self) -> usize {
        self.j.n()
    }

    /// `(I^f ∪ I^l) \ J`, sorted.
    pub fn complement(&self) -> Vec<usize> {
        let (k, n) = (self.k(), self.n());
        (1..=k)
            .chain(n - k + 1..=n)
            .filter(|v| !self.j.contains(*v))
            .collect()
    }

    /// `|I^f ∩ J|`.
    pub fn overlap(&self) -> usize {
        self.j.values().iter().filter(|&&v| v <= self.k()).count()
    }

    /// Pairs `I^f ∩ J` with `I^l \ J` and `I^f \ J` with `I^l ∩ J`,
    /// order-preserving within each group.
    pub fn replacement_pairing(&self) -> BTreeMap<usize, usize> {
        let (k, n) = (self.k(), self.n());
        let in_j: Vec<usize> = (1..=k).filter(|v| self.j.contains(*v)).collect();
        let out_j: Vec<usize> = (1..=k).filter(|v| !self.j.contains(*v)).collect();
        let last_out: Vec<usize> = (n - k + 1..=n).filter(|v| !self.j.contains(*v)).collect();
        let last_in: Vec<usize> = (n - k + 1..=n).filter(|v| self.j.contains(*v)).collect();
        assert_eq!(in_j.len(), last_out.len(), "pairing groups differ in size");
        assert_eq!(out_j.len(), last_in.len(), "pairing groups differ in size");
        in_j.into_iter()
            .zip(last_out)
            .chain(out_j.into_iter().zip(last_in))
            .collect()
    }

    /// `r(P)`: `I^f` with every `p ∈ P` replaced by its paired target, sorted.
    pub fn replace(&self, subset: &[usize]) -> Result<SignedIndex> {
        let k = self.k();
        let pairing = self.replacement_pairing();
        let mut tuple: Vec<usize> = (1..=k).collect();
        for &p in subset {
            if p == 0 || p > k {
                return Err(Error::InvalidIndex(format!("{p} is not in I^f")));
            }
            tuple[p - 1] = pairing[&p];
        }
        sort_with_sign(&tuple, self.n())
    }
}
