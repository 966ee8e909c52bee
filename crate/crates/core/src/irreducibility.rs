//! Degree bookkeeping for the factorization of `det H_{k,N}`.
//!
//! Setting variables to zero can only split irreducible factors further, so
//! every factorization of the full determinant must coarsen the factor-degree
//! pattern of each specialization. Intersecting the coarsenings of several
//! patterns and discarding degrees excluded by [`feasible_degrees`] either
//! leaves the single candidate `{k(N-k)}` (the determinant is irreducible) or
//! an honest "undecided".

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::degree::feasible_degrees;
use crate::error::{Error, Result};

/// Irreducible-factor degrees of one specialized determinant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorPattern {
    pub degrees: Vec<usize>,
    pub provenance: String,
}

impl FactorPattern {
    pub fn new(mut degrees: Vec<usize>, provenance: impl Into<String>) -> Self {
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        FactorPattern { degrees, provenance: provenance.into() }
    }

    pub fn total(&self) -> usize {
        self.degrees.iter().sum()
    }
}

pub const MAX_PATTERN_LEN: usize = 12;

fn sorted_desc(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

/// Every multiset obtained by grouping the entries of the pattern and
/// summing each group, each sorted in decreasing order.
pub fn coarsenings(pattern: &FactorPattern) -> Result<BTreeSet<Vec<usize>>> {
    let n = pattern.degrees.len();
    if n == 0 {
        return Err(Error::InvalidParameters("empty factor pattern".into()));
    }
    if n > MAX_PATTERN_LEN {
        return Err(Error::PatternTooLarge(n));
    }
    let mut states: BTreeSet<Vec<usize>> = BTreeSet::new();
    states.insert(Vec::new());
    for &d in &pattern.degrees {
        let mut next = BTreeSet::new();
        for s in &states {
            let mut fresh = s.clone();
            fresh.push(d);
            next.insert(sorted_desc(fresh));
            let distinct: BTreeSet<usize> = s.iter().copied().collect();
            for g in distinct {
                let mut merged = s.clone();
                let pos = merged.iter().position(|&x| x == g).unwrap();
                merged[pos] += d;
                next.insert(sorted_desc(merged));
            }
        }
        states = next;
    }
    Ok(states)
}

fn partitions_into(total: usize, parts: &[usize]) -> BTreeSet<Vec<usize>> {
    // parts ascending; build decreasing sequences
    fn rec(rem: usize, max_idx: usize, parts: &[usize], cur: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        if rem == 0 {
            out.insert(cur.clone());
            return;
        }
        for i in (0..=max_idx).rev() {
            let p = parts[i];
            if p <= rem {
                cur.push(p);
                rec(rem - p, i, parts, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    if !parts.is_empty() {
        rec(total, parts.len() - 1, parts, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Irreducible,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictReport {
    pub verdict: Verdict,
    /// Candidate factor-degree multisets still compatible with the data.
    pub survivors: Vec<Vec<usize>>,
    /// The divisibility rule used to filter degrees.
    pub filter: String,
}

/// Intersects the coarsenings of all patterns and keeps the candidates whose
/// degrees are all feasible. With no patterns the candidates are all
/// partitions of the total degree into feasible parts.
pub fn irreducible_verdict(k: usize, n: usize, patterns: &[FactorPattern]) -> Result<VerdictReport> {
    let feasible = feasible_degrees(k, n)?;
    let total = feasible.total;
    let mut candidates: Option<BTreeSet<Vec<usize>>> = None;
    for p in patterns {
        if p.total() != total {
            return Err(Error::Inconsistent(format!(
                "pattern {:?} ({}) sums to {}, expected {}",
                p.degrees,
                p.provenance,
                p.total(),
                total
            )));
        }
        let c = coarsenings(p)?;
        candidates = Some(match candidates {
            None => c,
            Some(prev) => prev.intersection(&c).cloned().collect(),
        });
    }
    let candidates = candidates.unwrap_or_else(|| partitions_into(total, &feasible.degrees));
    let survivors: Vec<Vec<usize>> = candidates.into_iter().filter(|c| c.iter().all(|&d| feasible.contains(d))).collect();
    if survivors.is_empty() {
        return Err(Error::Inconsistent(format!(
            "no factorization of det H_{{{k},{n}}} is compatible with the given patterns"
        )));
    }
    let verdict = if survivors == vec![vec![total]] { Verdict::Irreducible } else { Verdict::Undecided };
    Ok(VerdictReport {
        verdict,
        survivors,
        filter: format!("{k} | {}d and {} | 2d", k - 2, n - k),
    })
}

/// A constituent of a specialization: either a smaller Hessian whose factor
/// degrees are looked up, or a fixed pattern known by other means.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Piece {
    Hessian { k: usize, #[serde(rename = "N")] n: usize },
    Fixed { degrees: Vec<usize>, note: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Embedding {
    pub description: String,
    pub pieces: Vec<Piece>,
}

/// A family of specializations of `H_{k,N}` with known block-diagonal shape.
pub trait FactorRule: Send + Sync {
    fn name(&self) -> &'static str;
    fn embeddings(&self, k: usize, n: usize) -> Vec<Embedding>;
}

/// `H_{k,k+a} ⊕ H_{k,N-a} ↪ H_{k,N}` by zeroing the off-diagonal part of every
/// block, for the listed `a`.
pub struct ValueSplit {
    name: &'static str,
    widths: fn(usize, usize) -> Vec<usize>,
}

impl FactorRule for ValueSplit {
    fn name(&self) -> &'static str {
        self.name
    }
    fn embeddings(&self, k: usize, n: usize) -> Vec<Embedding> {
        (self.widths)(k, n)
            .into_iter()
            .filter(|&a| a >= 2 && n >= k + a + 2)
            .map(|a| Embedding {
                description: format!("H_{{{k},{}}} + H_{{{k},{}}}", k + a, n - a),
                pieces: vec![Piece::Hessian { k, n: k + a }, Piece::Hessian { k, n: n - a }],
            })
            .collect()
    }
}

/// `H_{k1,k1+s} ⊕ H_{k2,k2+s} ↪ H_{k,N}` by zeroing the blocks between two
/// groups of positions.
pub struct PositionSplit;

impl FactorRule for PositionSplit {
    fn name(&self) -> &'static str {
        "position-split"
    }
    fn embeddings(&self, k: usize, n: usize) -> Vec<Embedding> {
        let s = n - k;
        (2..=k / 2)
            .rev()
            .map(|k2| {
                let k1 = k - k2;
                Embedding {
                    description: format!("H_{{{k1},{}}} + H_{{{k2},{}}}", k1 + s, k2 + s),
                    pieces: vec![Piece::Hessian { k: k1, n: k1 + s }, Piece::Hessian { k: k2, n: k2 + s }],
                }
            })
            .collect()
    }
}

/// For `k = 4`, zeroing `A_34` leaves `±det(Q)^2` with `Q` the
/// `2(N-4)`-square block `[[A13, A14], [A23, A24]]`, whose determinant is
/// taken as irreducible.
pub struct BlockSquare;

impl FactorRule for BlockSquare {
    fn name(&self) -> &'static str {
        "block-square"
    }
    fn embeddings(&self, k: usize, n: usize) -> Vec<Embedding> {
        if k != 4 || n < 8 {
            return Vec::new();
        }
        let d = 2 * (n - 4);
        vec![Embedding {
            description: "A34 = 0".to_string(),
            pieces: vec![Piece::Fixed {
                degrees: vec![d, d],
                note: format!("square of the irreducible degree-{d} determinant of [[A13, A14], [A23, A24]]"),
            }],
        }]
    }
}

fn standard_widths(_k: usize, _n: usize) -> Vec<usize> {
    vec![2, 3, 4]
}

fn wide_widths(k: usize, n: usize) -> Vec<usize> {
    (5..=(n - k) / 2).collect()
}

/// Rules in the order the schedule consults them.
pub fn default_rules() -> Vec<Box<dyn FactorRule>> {
    vec![
        Box::new(ValueSplit { name: "value-split", widths: standard_widths }),
        Box::new(PositionSplit),
        Box::new(BlockSquare),
        Box::new(ValueSplit { name: "value-split-wide", widths: wide_widths }),
    ]
}

pub fn rule_names() -> Vec<&'static str> {
    default_rules().iter().map(|r| r.name()).collect()
}

/// The default rules restricted to `names`, keeping the default order.
pub fn select_rules(names: &[String]) -> Result<Vec<Box<dyn FactorRule>>> {
    let known = rule_names();
    for n in names {
        if !known.contains(&n.as_str()) {
            return Err(Error::Unknown { kind: "factor rule", name: n.clone() });
        }
    }
    Ok(default_rules().into_iter().filter(|r| names.iter().any(|n| n == r.name())).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    /// Taken as data (direct computation at small size).
    Seeded,
    /// Accepted without an available computation.
    Assumed,
    /// Produced by this engine.
    Derived,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KnownEntry {
    pub degrees: Vec<usize>,
    pub kind: EntryKind,
    pub note: String,
}

/// Irreducible-factor degrees of `det H_{k,N}` for known `(k, N)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnownFactorTable {
    entries: BTreeMap<(usize, usize), KnownEntry>,
}

impl KnownFactorTable {
    pub fn empty() -> Self {
        KnownFactorTable::default()
    }

    /// Base cases: the exceptional cube and square, and the sizes decided by
    /// direct symbolic computation.
    pub fn seeded() -> Self {
        let mut t = KnownFactorTable::empty();
        let seed = |t: &mut KnownFactorTable, k, n, d: Vec<usize>, note: &str| {
            t.insert(k, n, KnownEntry { degrees: d, kind: EntryKind::Seeded, note: note.to_string() })
        };
        seed(&mut t, 3, 6, vec![3, 3, 3], "cube of an irreducible cubic");
        seed(&mut t, 3, 7, vec![6, 6], "square of an irreducible sextic");
        seed(&mut t, 3, 9, vec![18], "irreducible by direct computation");
        seed(&mut t, 4, 8, vec![16], "irreducible by direct computation");
        seed(&mut t, 4, 9, vec![20], "irreducible by direct computation");
        seed(&mut t, 5, 10, vec![25], "irreducible by direct computation");
        t.insert(
            7,
            14,
            KnownEntry { degrees: vec![49], kind: EntryKind::Assumed, note: "irreducible by a large computation not repeated here".into() },
        );
        t
    }

    pub fn insert(&mut self, k: usize, n: usize, e: KnownEntry) {
        self.entries.insert((k, n), e);
    }

    pub fn get(&self, k: usize, n: usize) -> Option<&KnownEntry> {
        self.entries.get(&(k, n))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &KnownEntry)> {
        self.entries.iter()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddingRecord {
    pub rule: String,
    pub description: String,
    /// `None` when some piece has unknown factor degrees.
    pub pattern: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScheduleStep {
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub total: usize,
    /// `base`, `dual`, `closed-form` or `derived`.
    pub source: String,
    pub note: String,
    pub embeddings: Vec<EmbeddingRecord>,
    pub rules_consulted: Vec<String>,
    pub survivors: Vec<Vec<usize>>,
    pub verdict: String,
    /// Factor degrees when known.
    pub degrees: Option<Vec<usize>>,
}

/// Decides `(k, N)` cases recursively, memoizing results and recording one
/// [`ScheduleStep`] per decided case.
pub struct Engine {
    table: KnownFactorTable,
    rules: Vec<Box<dyn FactorRule>>,
    decided: BTreeMap<(usize, usize), Option<Vec<usize>>>,
    trace: Vec<ScheduleStep>,
}

impl Engine {
    pub fn new(table: KnownFactorTable, rules: Vec<Box<dyn FactorRule>>) -> Self {
        Engine { table, rules, decided: BTreeMap::new(), trace: Vec::new() }
    }

    pub fn with_defaults() -> Self {
        Engine::new(KnownFactorTable::seeded(), default_rules())
    }

    pub fn trace(&self) -> &[ScheduleStep] {
        &self.trace
    }

    /// Irreducible-factor degrees of `det H_{k,N}`, or `None` when unknown or
    /// when the determinant vanishes identically.
    pub fn factors(&mut self, k: usize, n: usize) -> Result<Option<Vec<usize>>> {
        if k == 0 || n <= k {
            return Ok(None);
        }
        if let Some(e) = self.table.get(k, n) {
            return Ok(Some(e.degrees.clone()));
        }
        if n - k < k {
            return self.factors(n - k, n);
        }
        if k == 1 {
            return Ok(None);
        }
        if k == 2 {
            // det H_{2,N} = det(A12)^2 = Pf(A12)^4
            return Ok(if n % 2 == 0 { Some(vec![(n - 2) / 2; 4]) } else { None });
        }
        if let Some(d) = self.decided.get(&(k, n)) {
            return Ok(d.clone());
        }
        let step = self.decide(k, n)?;
        let result = step.degrees.clone();
        self.decided.insert((k, n), result.clone());
        self.trace.push(step);
        Ok(result)
    }

    fn resolve(&mut self, piece: &Piece) -> Result<std::result::Result<Vec<usize>, String>> {
        match piece {
            Piece::Fixed { degrees, .. } => Ok(Ok(degrees.clone())),
            Piece::Hessian { k, n } => Ok(match self.factors(*k, *n)? {
                Some(d) => Ok(d),
                None => Err(format!("factor degrees of H_{{{k},{n}}} unknown or determinant zero")),
            }),
        }
    }

    fn decide(&mut self, k: usize, n: usize) -> Result<ScheduleStep> {
        let total = k * (n - k);
        let mut step = ScheduleStep {
            k,
            n,
            total,
            source: "derived".into(),
            note: String::new(),
            embeddings: Vec::new(),
            rules_consulted: Vec::new(),
            survivors: Vec::new(),
            verdict: "undecided".into(),
            degrees: None,
        };
        let mut report = irreducible_verdict(k, n, &[])?;
        if report.verdict == Verdict::Irreducible {
            step.note = format!("only feasible degree is {total}");
        }
        let mut patterns = Vec::new();
        let rules = std::mem::take(&mut self.rules);
        let outcome = (|| -> Result<()> {
            for rule in &rules {
                if report.verdict == Verdict::Irreducible {
                    break;
                }
                let embeddings = rule.embeddings(k, n);
                if embeddings.is_empty() {
                    continue;
                }
                step.rules_consulted.push(rule.name().to_string());
                for e in embeddings {
                    let mut degrees = Vec::new();
                    let mut skipped = None;
                    for piece in &e.pieces {
                        match self.resolve(piece)? {
                            Ok(d) => degrees.extend(d),
                            Err(why) => {
                                skipped = Some(why);
                                break;
                            }
                        }
                    }
                    let pattern = if skipped.is_none() { Some(sorted_desc(degrees)) } else { None };
                    if let Some(p) = &pattern {
                        patterns.push(FactorPattern::new(p.clone(), format!("{}: {}", rule.name(), e.description)));
                    }
                    step.embeddings.push(EmbeddingRecord {
                        rule: rule.name().to_string(),
                        description: e.description,
                        pattern,
                        skipped,
                    });
                }
                if !patterns.is_empty() {
                    report = irreducible_verdict(k, n, &patterns)?;
                }
            }
            Ok(())
        })();
        self.rules = rules;
        outcome?;
        step.survivors = report.survivors.clone();
        if report.verdict == Verdict::Irreducible {
            step.verdict = "irreducible".into();
            step.degrees = Some(vec![total]);
        }
        Ok(step)
    }

    fn base_step(&self, k: usize, n: usize, e: &KnownEntry) -> ScheduleStep {
        let irreducible = e.degrees.len() == 1;
        ScheduleStep {
            k,
            n,
            total: k * (n - k),
            source: "base".into(),
            note: format!("{} ({})", e.note, serde_json::to_string(&e.kind).unwrap().trim_matches('"')),
            embeddings: Vec::new(),
            rules_consulted: Vec::new(),
            survivors: vec![e.degrees.clone()],
            verdict: if irreducible { "irreducible".into() } else { format!("power: {:?}", e.degrees) },
            degrees: Some(e.degrees.clone()),
        }
    }

    /// The step describing `(k, N)` itself, deciding it first if needed.
    pub fn step_for(&mut self, k: usize, n: usize) -> Result<ScheduleStep> {
        if k < 3 || n < 2 * k {
            if n > k && n - k >= 3 && n - k < k {
                let mut s = self.step_for(n - k, n)?;
                s.note = format!("dual of H_{{{},{n}}}: {}", n - k, s.note);
                s.source = "dual".into();
                s.k = k;
                return Ok(s);
            }
            let degrees = self.factors(k, n)?;
            return Ok(ScheduleStep {
                k,
                n,
                total: k * n.saturating_sub(k),
                source: "closed-form".into(),
                note: match degrees {
                    Some(_) => "fourth power of a Pfaffian".into(),
                    None => "determinant vanishes identically".into(),
                },
                embeddings: Vec::new(),
                rules_consulted: Vec::new(),
                survivors: degrees.clone().into_iter().collect(),
                verdict: if degrees.is_some() { "closed-form".into() } else { "zero".into() },
                degrees,
            });
        }
        if let Some(e) = self.table.get(k, n).cloned() {
            return Ok(self.base_step(k, n, &e));
        }
        self.factors(k, n)?;
        Ok(self.trace.iter().rev().find(|s| s.k == k && s.n == n).cloned().expect("decided step recorded"))
    }
}

/// Decides `det H_{k,N}` for `2k <= N <= n_max` and returns one step per `N`.
pub fn run_schedule(engine: &mut Engine, k: usize, n_max: usize) -> Result<Vec<ScheduleStep>> {
    if k < 3 {
        return Err(Error::InvalidParameters("the schedule starts at k = 3".into()));
    }
    (2 * k..=n_max).map(|n| engine.step_for(k, n)).collect()
}
