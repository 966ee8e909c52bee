//! Degree constraints on polynomial factors of `det H_{k,N}` coming from the
//! existence of rectangular Young diagrams. These are necessary conditions
//! only.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FeasibleDegrees {
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub total: usize,
    pub degrees: Vec<usize>,
}

impl FeasibleDegrees {
    pub fn contains(&self, d: usize) -> bool {
        self.degrees.binary_search(&d).is_ok()
    }
}

fn check(k: usize, n: usize) -> Result<()> {
    if k < 2 || n <= k {
        return Err(Error::InvalidParameters(format!("degrees need k >= 2 and N > k, got k={k}, N={n}")));
    }
    Ok(())
}

fn is_feasible(k: usize, n: usize, d: usize) -> bool {
    (1..=k * (n - k)).contains(&d) && ((k - 2) * d) % k == 0 && (2 * d) % (n - k) == 0
}

/// All `d ∈ [1, k(N-k)]` with `k | (k-2)d` and `(N-k) | 2d`.
pub fn feasible_degrees(k: usize, n: usize) -> Result<FeasibleDegrees> {
    check(k, n)?;
    let total = k * (n - k);
    let degrees = (1..=total).filter(|&d| is_feasible(k, n, d)).collect();
    Ok(FeasibleDegrees { k, n, total, degrees })
}

/// Arithmetic behind one feasible degree: a rectangle with `(k-2)d/k` rows of
/// length `N-k`, and the two divisibilities that make it exist.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeWitness {
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub rectangle: (usize, usize),
    /// `k | (k-2)d`, as `(k, (k-2)d)`.
    pub position_divisibility: (usize, usize),
    /// `(N-k) | 2d`, as `(N-k, 2d)`.
    pub value_divisibility: (usize, usize),
}

pub fn cauchy_degree_witness(k: usize, n: usize, d: usize) -> Result<DegreeWitness> {
    check(k, n)?;
    if !is_feasible(k, n, d) {
        return Err(Error::InfeasibleDegree { k, n, d });
    }
    Ok(DegreeWitness {
        k,
        n,
        d,
        rectangle: ((k - 2) * d / k, n - k),
        position_divisibility: (k, (k - 2) * d),
        value_divisibility: (n - k, 2 * d),
    })
}
