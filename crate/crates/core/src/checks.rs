//! Property checks that return reports rather than panicking, shared by the
//! command line and the acceptance harness.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{act_translation, is_critical, random_array, zero_chart, ExteriorArray};
use crate::hessian::{
    apply_duality, assemble, assemble_symbolic, dual_array, dual_variable_map, hessian_at, specialize_embed,
    symbolic_array,
};
use crate::linalg::{det_bareiss, det_exact, det_field, Matrix};
use crate::multiindex::MultiIndex;
use crate::node::{admissible_sets, limit_report, LimitReport};
use crate::ring::{uni_root_structure, Integers, PolyRing, PrimeField, Rationals, Ring, UniPoly, DEFAULT_PRIMES};
use crate::rng::{task_id, task_rng};

/// The 3x3 matrix of the nine variables `a_p_p'_t_t'`, rows `pp' = 12, 13, 23`
/// and columns `tt' = 45, 46, 56`. Entries are the plain coefficients `a_J`
/// with `J = {1,2,3} \ {p,p'} ∪ {t,t'}`; the placement sign of `a^{tt'}_{pp'}`
/// is not applied (it would flip row `13` and the sign of the identity).
pub fn h36_minor_matrix<R: Ring>(ring: &R, a: &ExteriorArray<R::Elem>) -> Result<Matrix<R::Elem>> {
    let rows = [(1, 2), (1, 3), (2, 3)];
    let cols = [(4, 5), (4, 6), (5, 6)];
    let mut m = Matrix::filled(3, 3, ring.zero());
    for (i, &(p, p2)) in rows.iter().enumerate() {
        for (j, &(t, t2)) in cols.iter().enumerate() {
            let mut vals: Vec<usize> = (1..=3).filter(|&v| v != p && v != p2).collect();
            vals.extend([t, t2]);
            m.set(i, j, a.get(ring, &MultiIndex::new(vals, 6)?));
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub symbolic_checked: bool,
    pub symbolic_zero: Option<bool>,
    pub det_terms: Option<usize>,
    pub prime: u64,
    pub trials: usize,
    pub trials_agreeing: usize,
    pub pass: bool,
}

/// `det H_{3,6} = 2 det(M)^3`: optionally as a polynomial identity, and at
/// `trials` random points over a word-sized prime field.
pub fn identity_h36(trials: usize, seed: u64, symbolic: bool) -> Result<IdentityReport> {
    if trials == 0 {
        return Err(Error::InvalidParameters("trials must be at least 1".into()));
    }
    let (mut symbolic_zero, mut det_terms) = (None, None);
    if symbolic {
        let (h, names) = assemble_symbolic(3, 6)?;
        let ring = PolyRing::new(names.len());
        let (a, _) = symbolic_array(3, 6)?;
        let d = det_exact(&ring, h.matrix())?;
        let m = det_exact(&ring, &h36_minor_matrix(&ring, &a)?)?;
        let diff = d.sub(&m.pow(3).scale(&BigRational::from_integer(2.into())));
        det_terms = Some(d.num_terms());
        symbolic_zero = Some(diff.is_zero());
    }
    let f = PrimeField::new(DEFAULT_PRIMES[0]);
    let mut rng = task_rng(seed, task_id("identity-h36"));
    let mut agreeing = 0;
    for _ in 0..trials {
        let mut a = ExteriorArray::new(3, 6)?;
        for (idx, _) in crate::hessian::symbolic_variables(3, 6) {
            a.set(&f, idx, rng.gen_range(0..f.modulus()))?;
        }
        let lhs = det_field(&f, assemble(&f, &a)?.matrix())?;
        let m = det_field(&f, &h36_minor_matrix(&f, &a)?)?;
        let rhs = f.mul(&f.from_i64(2), &f.pow(&m, 3));
        if lhs == rhs {
            agreeing += 1;
        }
    }
    Ok(IdentityReport {
        symbolic_checked: symbolic,
        symbolic_zero,
        det_terms,
        prime: f.modulus(),
        trials,
        trials_agreeing: agreeing,
        pass: symbolic_zero != Some(false) && agreeing == trials,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LineTrial {
    pub degree: Option<usize>,
    pub root_degree: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LineReport {
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub power: u32,
    pub zeroed_block: Option<(usize, usize)>,
    pub trials: Vec<LineTrial>,
    /// Trials whose restriction is a nonzero constant times a `power`-th power.
    pub powers: usize,
    pub pass: bool,
}

fn array_line(u: &ExteriorArray<BigInt>, v: &ExteriorArray<BigInt>, s: i64) -> Result<ExteriorArray<BigInt>> {
    let mut out = ExteriorArray::new(u.k(), u.n())?;
    for (i, x) in u.entries() {
        let y = v.get(&Integers, i);
        out.set(&Integers, i.clone(), x + y * BigInt::from(s))?;
    }
    Ok(out)
}

/// Restricts `det H_{k,N}` (optionally with block `(i, j)` zeroed) to random
/// integer lines `u + s v`, interpolates the univariate polynomial exactly
/// from `k(N-k) + 1` values, and tests for a `power`-th power up to a
/// constant.
pub fn line_restriction(
    k: usize,
    n: usize,
    power: u32,
    zeroed_block: Option<(usize, usize)>,
    trials: usize,
    seed: u64,
) -> Result<LineReport> {
    let side = k * (n - k);
    let mut rng = task_rng(seed, task_id(&format!("line-{k}-{n}-{power}-{zeroed_block:?}")));
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let u = random_array(&mut rng, k, n, -9, 9)?;
        let v = random_array(&mut rng, k, n, -9, 9)?;
        let mut xs = Vec::with_capacity(side + 1);
        let mut ys = Vec::with_capacity(side + 1);
        for s in 0..=side as i64 {
            let mut h = assemble(&Integers, &array_line(&u, &v, s)?)?;
            if let Some((i, j)) = zeroed_block {
                h.zero_block(&Integers, i, j);
            }
            xs.push(BigRational::from_integer(s.into()));
            ys.push(BigRational::from_integer(det_bareiss(&Integers, h.matrix())?));
        }
        let f: UniPoly = UniPoly::interpolate(&xs, &ys)?;
        let root = uni_root_structure(&f, power);
        out.push(LineTrial { degree: f.degree(), root_degree: root.and_then(|g| g.degree()) });
    }
    let powers = out.iter().filter(|t| t.degree.is_some() && t.root_degree.is_some()).count();
    Ok(LineReport { k, n, power, zeroed_block, pass: powers == trials, powers, trials: out })
}

#[derive(Clone, Debug, Serialize)]
pub struct ParityRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: usize,
    pub nonzero: usize,
    pub expect_zero: bool,
    pub pass: bool,
}

/// `det H_{2,N}` vanishes for odd `N` and not for even `N`.
pub fn k2_parity(ns: &[usize], trials: usize, seed: u64) -> Result<Vec<ParityRow>> {
    ns.iter()
        .map(|&n| {
            let mut rng = task_rng(seed, task_id(&format!("parity-{n}")));
            let mut nonzero = 0;
            for _ in 0..trials {
                let a = random_array(&mut rng, 2, n, -9, 9)?;
                if !det_bareiss(&Integers, assemble(&Integers, &a)?.matrix())?.is_zero() {
                    nonzero += 1;
                }
            }
            let expect_zero = n % 2 == 1;
            let pass = if expect_zero { nonzero == 0 } else { nonzero > 0 };
            Ok(ParityRow { n, trials, nonzero, expect_zero, pass })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// The reordered symbolic matrix is the complementary symbolic Hessian up
    /// to a signed renaming of variables, zero pattern included.
    pub symbolic_pattern: bool,
    pub symbolic_detail: String,
    pub trials: usize,
    pub trials_equal: usize,
    pub pass: bool,
}

/// Duality on `(k, N)`: symbolic pattern check plus exact determinant
/// equality `det H(A) = det H(A*) = det P H(A) Pᵀ` on random arrays.
pub fn duality_check(k: usize, n: usize, trials: usize, seed: u64) -> Result<DualityReport> {
    let (symbolic_pattern, symbolic_detail) = match dual_variable_map(k, n) {
        Ok(map) => (true, format!("{} variables matched", map.len())),
        Err(e) => (false, e.to_string()),
    };
    let mut rng = task_rng(seed, task_id(&format!("duality-{k}-{n}")));
    let mut equal = 0;
    for _ in 0..trials {
        let a = random_array(&mut rng, k, n, -9, 9)?;
        let h = assemble(&Integers, &a)?;
        let hd = assemble(&Integers, &dual_array(&Integers, &a)?)?;
        let d = det_bareiss(&Integers, h.matrix())?;
        let same_matrix = apply_duality(&h) == hd;
        if same_matrix && d == det_bareiss(&Integers, hd.matrix())? {
            equal += 1;
        }
    }
    Ok(DualityReport {
        k,
        n,
        symbolic_pattern,
        symbolic_detail,
        trials,
        trials_equal: equal,
        pass: symbolic_pattern && equal == trials,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpecializationReport {
    pub k: usize,
    pub sizes: (usize, usize),
    pub trials: usize,
    pub trials_multiplicative: usize,
    pub signs: Vec<i8>,
    pub pass: bool,
}

/// `det specialize_embed(H1, H2) = ±det H1 det H2` on random pairs.
pub fn specialization_check(k: usize, a: usize, b: usize, trials: usize, seed: u64) -> Result<SpecializationReport> {
    let mut rng = task_rng(seed, task_id(&format!("specialize-{k}-{a}-{b}")));
    let mut ok = 0;
    let mut signs = Vec::new();
    for _ in 0..trials {
        let h1 = assemble(&Integers, &random_array(&mut rng, k, a, -9, 9)?)?;
        let h2 = assemble(&Integers, &random_array(&mut rng, k, b, -9, 9)?)?;
        let d = det_bareiss(&Integers, specialize_embed(&Integers, &h1, &h2)?.matrix())?;
        let prod = det_bareiss(&Integers, h1.matrix())? * det_bareiss(&Integers, h2.matrix())?;
        let sign = if d == prod {
            1
        } else if d == -prod.clone() {
            -1
        } else {
            0
        };
        if sign != 0 {
            ok += 1;
        }
        if !signs.contains(&sign) {
            signs.push(sign);
        }
    }
    Ok(SpecializationReport { k, sizes: (a, b), trials, trials_multiplicative: ok, signs, pass: ok == trials })
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivarianceReport {
    pub instances: usize,
    pub hessian_agree: usize,
    pub criticality_agree: usize,
    /// Instances built to be critical at `X` that were recognised as such.
    pub critical_found: usize,
    pub critical_instances: usize,
    pub pass: bool,
}

/// An array whose form is critical at the chart origin: zero on the star of
/// `I^f`, random elsewhere.
fn critical_at_origin<G: Rng>(rng: &mut G, k: usize, n: usize) -> Result<ExteriorArray<BigRational>> {
    let mut a = random_array(rng, k, n, -5, 5)?.to_rational();
    for i in MultiIndex::first(k, n).star() {
        a.set(&Rationals, i, BigRational::zero())?;
    }
    Ok(a)
}

/// Hessian assembly and criticality commute with translation: on each
/// instance `H(A, X) = H(A·X)`, and `A` is critical at `X` iff `A·X` is
/// critical at the origin. Every other instance is made critical at `X` by
/// translating an origin-critical array by `-X`.
pub fn equivariance(shapes: &[(usize, usize)], instances: usize, seed: u64) -> Result<EquivarianceReport> {
    let mut rng = task_rng(seed, task_id("equivariance"));
    let (mut hes, mut crit, mut found, mut planted) = (0, 0, 0, 0);
    for i in 0..instances {
        let (k, n) = shapes[i % shapes.len()];
        let x = Matrix::from_fn(k, n - k, |_, _| BigRational::from_integer(rng.gen_range(-3i64..=3).into()));
        let a = if i % 2 == 1 {
            planted += 1;
            let neg = x.map(|v| -v.clone());
            act_translation(&critical_at_origin(&mut rng, k, n)?, &neg)?
        } else {
            random_array(&mut rng, k, n, -5, 5)?.to_rational()
        };
        let moved = act_translation(&a, &x)?;
        if hessian_at(&a, &x)? == assemble(&Rationals, &moved)? {
            hes += 1;
        }
        let at_x = is_critical(&Rationals, &a, &x)?;
        if at_x == is_critical(&Rationals, &moved, &zero_chart(&Rationals, k, n))? {
            crit += 1;
        }
        if i % 2 == 1 && at_x {
            found += 1;
        }
    }
    Ok(EquivarianceReport {
        instances,
        hessian_agree: hes,
        criticality_agree: crit,
        critical_found: found,
        critical_instances: planted,
        pass: hes == instances && crit == instances && found == planted,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpanSweep {
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub overlaps: (usize, usize),
    pub sets: usize,
    pub spans_equal: usize,
    pub failures: Vec<LimitReport>,
    pub pass: bool,
}

/// Limit spans for every admissible `J` on `(k, N)` with overlap in range.
pub fn limit_span_sweep(k: usize, n: usize, lo: usize, hi: usize) -> Result<SpanSweep> {
    let sets = admissible_sets(k, n, lo..=hi)?;
    let mut equal = 0;
    let mut failures = Vec::new();
    for j in &sets {
        let r = limit_report(j)?;
        if r.spans_equal {
            equal += 1;
        } else {
            failures.push(r);
        }
    }
    Ok(SpanSweep {
        k,
        n,
        overlaps: (lo, hi),
        sets: sets.len(),
        spans_equal: equal,
        pass: !sets.is_empty() && failures.is_empty(),
        failures,
    })
}
