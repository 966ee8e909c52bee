//! Explicit integer matrices witnessing corank one, invertibility and node
//! pair conditions, compiled in from `data/`, with loaders and verifiers.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exterior::random_array;
use crate::hessian::{apply_duality, assemble, block_row_rank, position_embed, specialize_embed, strip_row_ranks, HessianMatrix};
use crate::linalg::{det_bareiss, rank_exact, Matrix};
use crate::node::{k4_partner, verify_k4_tuple, verify_node_pair_k3, NodePairReport};
use crate::ring::Integers;
use crate::rng::{task_id, task_rng};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    Corank1,
    Invertible,
    Nodepair,
}

impl CertificateKind {
    pub fn name(self) -> &'static str {
        match self {
            CertificateKind::Corank1 => "corank1",
            CertificateKind::Invertible => "invertible",
            CertificateKind::Nodepair => "nodepair",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub id: String,
    pub kind: CertificateKind,
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// Upper blocks `A_ij` (`i < j`), or the whole matrix under `H`.
    pub blocks: BTreeMap<String, Vec<Vec<i64>>>,
    pub claim: String,
}

const EMBEDDED: &[(&str, &str, &str)] = &[
    ("corank-3-9", include_str!("../data/corank-3-9.json"), "95f25e032748aeed6a84d9cd7a157d71a9b17627ceccf03ebf0b52fb3cd83b81"),
    ("corank-3-10", include_str!("../data/corank-3-10.json"), "863f3da2cb93623a40764175d15adeefa17d59b0f241d42448c7f443dcd15a72"),
    ("corank-3-11", include_str!("../data/corank-3-11.json"), "b8241b66782b9c700f732bbd5003c3f84bf8d3a874407ebc3c4c5f229c6b667d"),
    ("corank-4-8", include_str!("../data/corank-4-8.json"), "5b892d29cb7917b044b36907be9a760a10aefff0fcaccc0a42ca18cf113cba05"),
    ("corank-4-9", include_str!("../data/corank-4-9.json"), "b597512c62fd0098a18d3d4ecc40779d42a6b06641a7287744046c75697f3d44"),
    ("corank-5-10", include_str!("../data/corank-5-10.json"), "8880b1c1a357d6582f786db6cc968c740b5027864032039e94e372fc7ebef9f1"),
    ("invertible-4-8", include_str!("../data/invertible-4-8.json"), "00788457077516b588d3799848db6b1b524c28054d316ab00cf0d8f7a71d5094"),
    ("node-3-9", include_str!("../data/node-3-9.json"), "be21182c7da87aeac3385fad237096fc8fc00a01cc7f73444b75f2d2af1d284f"),
    ("node-3-10", include_str!("../data/node-3-10.json"), "4c1b9cc9274317a2a0bc3d94adee5f0da24526ef49cbf9ee1cdd6181604da447"),
    ("node-3-11", include_str!("../data/node-3-11.json"), "0d9ab6d05fa05feffbef2df93a9910cd7646481c10fe578dd7ddca7840f903c0"),
];

pub fn certificate_ids() -> Vec<&'static str> {
    EMBEDDED.iter().map(|e| e.0).collect()
}

fn block_names(k: usize) -> Vec<String> {
    let mut out = Vec::new();
    for i in 1..=k {
        for j in i + 1..=k {
            out.push(format!("A{i}{j}"));
        }
    }
    out
}

impl Certificate {
    /// Checks block names and sizes against `(k, N)`.
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 || self.n <= self.k {
            return Err(Error::InvalidParameters(format!("bad (k, N) = ({}, {})", self.k, self.n)));
        }
        let (want, side): (Vec<String>, usize) = match self.kind {
            CertificateKind::Invertible if self.blocks.contains_key("H") => (vec!["H".into()], self.k * (self.n - self.k)),
            _ => (block_names(self.k), self.n - self.k),
        };
        let have: Vec<String> = self.blocks.keys().cloned().collect();
        let mut want_sorted = want.clone();
        want_sorted.sort();
        if have != want_sorted {
            return Err(Error::Dimension(format!("expected blocks {want:?}, found {have:?}")));
        }
        for (name, rows) in &self.blocks {
            if rows.len() != side {
                return Err(Error::Dimension(format!("{name} has {} rows, expected {side}", rows.len())));
            }
            if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != side) {
                return Err(Error::Dimension(format!("{name} row {} has length {}, expected {side}", r + 1, row.len())));
            }
        }
        if self.kind == CertificateKind::Nodepair && self.k != 3 {
            return Err(Error::InvalidParameters("node pair certificates have k = 3".into()));
        }
        Ok(())
    }

    /// The assembled Hessian.
    pub fn hessian(&self) -> Result<HessianMatrix<BigInt>> {
        self.validate()?;
        let big = |rows: &Vec<Vec<i64>>| Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect());
        let h = if let Some(rows) = self.blocks.get("H") {
            HessianMatrix::from_matrix(self.k, self.n, big(rows)?)?
        } else {
            let mut upper = BTreeMap::new();
            for i in 1..=self.k {
                for j in i + 1..=self.k {
                    upper.insert((i, j), big(&self.blocks[&format!("A{i}{j}")])?);
                }
            }
            HessianMatrix::from_upper_blocks(&Integers, self.k, self.n, &upper)?
        };
        Ok(h)
    }

    /// First entry breaking skew symmetry inside the blocks, if any.
    pub fn structure_violation(&self) -> Option<String> {
        let h = match self.hessian() {
            Ok(h) => h,
            Err(e) => return Some(e.to_string()),
        };
        h.check_structure(&Integers).err()
    }
}

/// The fixed pretty layout used for the data files: one matrix row per line.
pub fn canonical_json(c: &Certificate) -> String {
    let mut s = String::from("{\n");
    s += &format!("  \"id\": {},\n", serde_json::to_string(&c.id).unwrap());
    s += &format!("  \"kind\": \"{}\",\n", c.kind.name());
    s += &format!("  \"k\": {},\n  \"N\": {},\n  \"blocks\": {{\n", c.k, c.n);
    let blocks: Vec<String> = c
        .blocks
        .iter()
        .map(|(name, rows)| {
            let body: Vec<String> = rows
                .iter()
                .map(|r| format!("      [{}]", r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")))
                .collect();
            format!("    {}: [\n{}\n    ]", serde_json::to_string(name).unwrap(), body.join(",\n"))
        })
        .collect();
    s += &blocks.join(",\n");
    s += &format!("\n  }},\n  \"claim\": {}\n}}\n", serde_json::to_string(&c.claim).unwrap());
    s
}

/// SHA-256 of the canonical JSON.
pub fn checksum(c: &Certificate) -> String {
    hex::encode(Sha256::digest(canonical_json(c).as_bytes()))
}

pub fn parse(text: &str) -> Result<Certificate> {
    let c: Certificate = serde_json::from_str(text)?;
    c.validate()?;
    Ok(c)
}

pub fn load(id: &str) -> Result<Certificate> {
    let (_, text, pinned) = EMBEDDED
        .iter()
        .find(|e| e.0 == id)
        .ok_or_else(|| Error::Unknown { kind: "certificate", name: id.to_string() })?;
    let c = parse(text)?;
    let sum = checksum(&c);
    if sum != *pinned {
        return Err(Error::Inconsistent(format!("checksum of embedded {id} is {sum}, pinned {pinned}")));
    }
    Ok(c)
}

/// Checksums of every embedded certificate, by id.
pub fn embedded_checksums() -> BTreeMap<String, String> {
    EMBEDDED.iter().map(|e| (e.0.to_string(), e.2.to_string())).collect()
}

pub fn export(c: &Certificate, path: &Path) -> Result<()> {
    c.validate()?;
    std::fs::write(path, canonical_json(c))?;
    Ok(())
}

pub fn import(path: &Path) -> Result<Certificate> {
    parse(&std::fs::read_to_string(path)?)
}

/// Location of the first entry where `c` differs from the embedded record
/// with the same id.
pub fn diff_against_embedded(c: &Certificate) -> Option<String> {
    let orig = load(&c.id).ok()?;
    if orig.k != c.k || orig.n != c.n || orig.kind != c.kind {
        return Some("header differs from the embedded record".into());
    }
    for (name, rows) in &orig.blocks {
        let Some(other) = c.blocks.get(name) else {
            return Some(format!("block {name} missing"));
        };
        for (r, (a, b)) in rows.iter().zip(other).enumerate() {
            for (col, (x, y)) in a.iter().zip(b).enumerate() {
                if x != y {
                    return Some(format!("{name}[{},{}] is {y}, embedded record has {x}", r + 1, col + 1));
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateReport {
    pub id: String,
    pub kind: CertificateKind,
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub checksum: String,
    pub pass: bool,
    pub checks: Vec<CheckOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_row_ranks: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strip_row_ranks: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub det: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node: Option<NodePairReport>,
}

impl CertificateReport {
    fn new(c: &Certificate) -> Self {
        CertificateReport {
            id: c.id.clone(),
            kind: c.kind,
            k: c.k,
            n: c.n,
            checksum: checksum(c),
            pass: false,
            checks: Vec::new(),
            side: None,
            rank: None,
            block_row_ranks: None,
            strip_row_ranks: None,
            det: None,
            node: None,
        }
    }

    fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(CheckOutcome { name: name.into(), pass, detail: detail.into() });
    }
}

/// The verification attached to one certificate kind.
pub trait CertificateCheck: Send + Sync {
    fn kind(&self) -> CertificateKind;
    fn run(&self, h: &HessianMatrix<BigInt>, seed: u64, report: &mut CertificateReport) -> Result<()>;
}

/// Corank one, and full rank of every block row of height `N-k`.
pub struct CorankOne;

impl CertificateCheck for CorankOne {
    fn kind(&self) -> CertificateKind {
        CertificateKind::Corank1
    }
    fn run(&self, h: &HessianMatrix<BigInt>, _seed: u64, report: &mut CertificateReport) -> Result<()> {
        let side = h.side();
        let rank = rank_exact(h.matrix());
        let rows: Vec<usize> = (1..=h.k()).map(|i| block_row_rank(h, i)).collect();
        report.side = Some(side);
        report.rank = Some(rank);
        report.check("corank", rank + 1 == side, format!("rank {rank} of {side}"));
        let full = rows.iter().all(|&r| r == h.block_size());
        report.check("block rows", full, format!("ranks {rows:?}, full rank {}", h.block_size()));
        report.block_row_ranks = Some(rows);
        report.strip_row_ranks = Some(strip_row_ranks(h));
        Ok(())
    }
}

/// Nonzero determinant; for `k = 4` the partner Hessian at `x'` is
/// reported too.
pub struct Invertible;

impl CertificateCheck for Invertible {
    fn kind(&self) -> CertificateKind {
        CertificateKind::Invertible
    }
    fn run(&self, h: &HessianMatrix<BigInt>, _seed: u64, report: &mut CertificateReport) -> Result<()> {
        let det = det_bareiss(&Integers, h.matrix())?;
        report.side = Some(h.side());
        report.check("determinant", !det.is_zero(), format!("det = {det}"));
        report.det = Some(det.to_string());
        if h.k() == 4 {
            let partner = k4_partner(h)?;
            let tuple = verify_k4_tuple(h, &partner)?;
            let pdet = det_bareiss(&Integers, partner.matrix())?;
            report.check("tuple relation", tuple, format!("partner det = {pdet}"));
        }
        Ok(())
    }
}

/// Conditions (i)–(iv) and both determinants after a seeded completion.
pub struct NodePairCheck;

impl CertificateCheck for NodePairCheck {
    fn kind(&self) -> CertificateKind {
        CertificateKind::Nodepair
    }
    fn run(&self, h: &HessianMatrix<BigInt>, seed: u64, report: &mut CertificateReport) -> Result<()> {
        let r = verify_node_pair_k3(h, seed)?;
        report.check("condition (i)", r.condition_i.holds, r.condition_i.violations.join("; "));
        report.check("condition (ii)", r.condition_ii.holds, r.condition_ii.violations.join("; "));
        report.check("condition (iii)", r.condition_iii.holds, r.condition_iii.violations.join("; "));
        report.check("condition (iv)", r.condition_iv.holds, r.condition_iv.violations.join("; "));
        report.check("common array", r.common_array, "");
        report.check("det H(x0)", r.det_a != "0", format!("det = {}", r.det_a));
        report.check("det H(x')", r.det_b != "0", format!("det = {} (seed {:?})", r.det_b, r.seed_used));
        report.node = Some(r);
        Ok(())
    }
}

pub fn certificate_checks() -> Vec<Box<dyn CertificateCheck>> {
    vec![Box::new(CorankOne), Box::new(Invertible), Box::new(NodePairCheck)]
}

/// Runs the checks for the certificate's kind. A payload differing from the
/// embedded record of the same id fails with the first differing entry.
pub fn verify_certificate(c: &Certificate, seed: u64) -> Result<CertificateReport> {
    let mut report = CertificateReport::new(c);
    if let Some(d) = diff_against_embedded(c) {
        report.check("matches embedded record", false, d);
    }
    let h = match c.hessian() {
        Ok(h) => h,
        Err(e) => {
            report.check("structure", false, e.to_string());
            return Ok(report);
        }
    };
    if let Err(e) = h.check_structure(&Integers) {
        report.check("structure", false, e);
        return Ok(report);
    }
    let check = certificate_checks().into_iter().find(|x| x.kind() == c.kind).expect("every kind has a check");
    check.run(&h, seed, &mut report)?;
    report.pass = report.checks.iter().all(|x| x.pass);
    Ok(report)
}

pub fn verify(id: &str, seed: u64) -> Result<CertificateReport> {
    verify_certificate(&load(id)?, seed)
}

/// A corank-one Hessian produced by specialization.
#[derive(Clone, Debug)]
pub struct BuiltCertificate {
    pub h: HessianMatrix<BigInt>,
    /// How each size was reached, smallest first.
    pub chain: Vec<String>,
}

const MAX_FULL_RANK_TRIES: usize = 16;

/// A random invertible `H_{k,N}` from arrays with entries in `[-2, 2]`.
pub fn random_full_rank(k: usize, n: usize, seed: u64) -> Result<HessianMatrix<BigInt>> {
    let mut rng = task_rng(seed, task_id(&format!("full-rank-{k}-{n}")));
    for _ in 0..MAX_FULL_RANK_TRIES {
        let a = random_array(&mut rng, k, n, -2, 2)?;
        let h = assemble(&Integers, &a)?;
        if !det_bareiss(&Integers, h.matrix())?.is_zero() {
            return Ok(h);
        }
        let _: u8 = rng.gen();
    }
    Err(Error::Inconsistent(format!("no invertible H_{{{k},{n}}} in {MAX_FULL_RANK_TRIES} random tries")))
}

/// Builds a corank-one Hessian with full block rows for `(k, N)` from the
/// embedded ones, using
/// `H_{3,6} ⊕ H_{3,a} ↪ H_{3,a+3}`, `H_{4,6} ⊕ H_{4,a} ↪ H_{4,a+2}`,
/// `H_{5,8} ⊕ H_{5,a} ↪ H_{5,a+3}` and `H_{3,N-k+3} ⊕ H_{k-3,N-3} ↪ H_{k,N}`
/// with the first (last) summand invertible, and duality for `N < 2k`.
pub fn build_corank(k: usize, n: usize, seed: u64) -> Result<BuiltCertificate> {
    let id = format!("corank-{k}-{n}");
    if let Ok(c) = load(&id) {
        return Ok(BuiltCertificate { h: c.hessian()?, chain: vec![format!("{id}: embedded")] });
    }
    if n > k && n - k >= 2 && n < 2 * k {
        let mut b = build_corank(n - k, n, seed)?;
        b.h = apply_duality(&b.h);
        b.chain.push(format!("H_{{{k},{n}}}: dual of H_{{{},{n}}}", n - k));
        return Ok(b);
    }
    let value_split = |small: usize, grow: usize| -> Result<BuiltCertificate> {
        let mut b = build_corank(k, n - grow, seed)?;
        let f = random_full_rank(k, small, seed)?;
        b.h = specialize_embed(&Integers, &f, &b.h)?;
        b.chain.push(format!("H_{{{k},{n}}}: H_{{{k},{small}}} (invertible) + H_{{{k},{}}}", n - grow));
        Ok(b)
    };
    match k {
        3 if n >= 12 => value_split(6, 3),
        4 if n >= 10 => value_split(6, 2),
        5 if n >= 13 => value_split(8, 3),
        k if k >= 5 && n >= 2 * k && (k > 5 || (n - 3) % 2 == 0) => {
            let mut b = build_corank(3, n - k + 3, seed)?;
            let f = random_full_rank(k - 3, n - 3, seed)?;
            b.h = position_embed(&Integers, &b.h, &f)?;
            b.chain.push(format!("H_{{{k},{n}}}: H_{{3,{}}} + H_{{{},{}}} (invertible)", n - k + 3, k - 3, n - 3));
            Ok(b)
        }
        5 if n == 12 => value_split(8, 3),
        _ => Err(Error::MissingBase { k, n }),
    }
}

/// Builds and checks a corank-one certificate for `(k, N)`.
pub fn build_and_verify(k: usize, n: usize, seed: u64) -> Result<(BuiltCertificate, CertificateReport)> {
    let built = build_corank(k, n, seed)?;
    let c = Certificate {
        id: format!("built-corank-{k}-{n}"),
        kind: CertificateKind::Corank1,
        k,
        n,
        blocks: upper_blocks(&built.h),
        claim: built.chain.join("; "),
    };
    let report = verify_certificate(&c, seed)?;
    Ok((built, report))
}

/// The upper blocks `A_ij` of a Hessian as certificate payload.
pub fn upper_blocks(h: &HessianMatrix<BigInt>) -> BTreeMap<String, Vec<Vec<i64>>> {
    let mut out = BTreeMap::new();
    for i in 1..=h.k() {
        for j in i + 1..=h.k() {
            let b = h.block(i, j);
            let rows = b
                .to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(|v| i64::try_from(v).expect("small entries")).collect())
                .collect();
            out.insert(format!("A{i}{j}"), rows);
        }
    }
    out
}
