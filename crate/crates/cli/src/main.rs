use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use grassdual::certificates::{self, CertificateKind, CertificateReport, ARTIFACT_VERSION};
use grassdual::checks;
use grassdual::degree::feasible_degrees;
use grassdual::exterior::{is_critical, zero_chart, ExteriorArray};
use grassdual::formats::{self, hessian_to_json, integer_matrix, matrix_to_json};
use grassdual::hessian::{
    apply_duality, assemble, assemble_symbolic, block_row_rank, dual_array, hessian_at, specialize_embed,
    HessianMatrix,
};
use grassdual::irreducibility::{run_schedule, select_rules, Engine, KnownFactorTable};
use grassdual::linalg::{det_rational, determinant_strategy, rank_rational, Matrix};
use grassdual::multiindex::NodeIndexSet;
use grassdual::node::{self, format_linear_form, LaurentForm, NodePointSpec, TValue};
use grassdual::ring::{format_rational, parse_rational, Rationals};

#[derive(Parser)]
#[command(name = "grassdual", version, about = "Exact Hessian, node and certificate computations for dual Grassmannians")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Hessian of an array at the chart origin (or at --at), or the symbolic Hessian.
    Hessian {
        #[arg(long, required_unless_present = "symbolic")]
        input: Option<PathBuf>,
        /// Chart point as {"rows": [[...]]}, k x (N-k).
        #[arg(long)]
        at: Option<PathBuf>,
        #[arg(long, requires_all = ["k", "n"])]
        symbolic: bool,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long = "N")]
        n: Option<usize>,
    },
    /// Exact determinant of a Hessian (matrix or array input).
    Det {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "bareiss")]
        method: String,
    },
    /// Exact rank and corank of a Hessian.
    Rank {
        #[arg(long)]
        input: PathBuf,
    },
    /// Feasible factor degrees for (k, N).
    Degrees {
        #[arg(long)]
        k: usize,
        #[arg(long = "N")]
        n: usize,
    },
    /// Irreducibility trace for (k, N), or a schedule up to --max.
    Irreducible {
        #[arg(long)]
        k: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        max: Option<usize>,
        /// Comma-separated rule names, in order.
        #[arg(long, value_delimiter = ',')]
        rules: Option<Vec<String>>,
    },
    /// Value-split specialization of two Hessians with the same k.
    Specialize {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Dual array and determinant equality, or the symbolic duality check for --k --N.
    Duality {
        #[arg(long, conflicts_with_all = ["k", "n"])]
        input: Option<PathBuf>,
        #[arg(long, requires = "n")]
        k: Option<usize>,
        #[arg(long = "N", requires = "k")]
        n: Option<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// The point x(J, T), its defining forms and their limit at T = 0.
    Node {
        #[arg(long)]
        k: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "J", value_delimiter = ',', required = true)]
        j: Vec<usize>,
        #[arg(long = "T", conflicts_with = "symbolic")]
        t: Option<String>,
        #[arg(long)]
        symbolic: bool,
    },
    /// Verify embedded certificates (all, one id, or a certificate file).
    VerifyCertificates {
        #[arg(long, conflicts_with = "input")]
        id: Option<String>,
        #[arg(long)]
        input: Option<PathBuf>,
        /// Also write the canonical JSON of each verified certificate here.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Condition-by-condition report for a node certificate.
    VerifyNode {
        #[arg(long)]
        id: String,
    },
    /// det H_{3,6} = 2 det(M)^3, symbolically and at random prime-field points.
    IdentityH36 {
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        skip_symbolic: bool,
    },
    /// Whether an array's form is critical at a chart point.
    Critical {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        at: Option<PathBuf>,
    },
}

/// Input problems map to exit code 2; everything else that fails is 1.
struct Failure {
    input: bool,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { input: true, error: e.into() }
    }
}

struct Outcome {
    report: Value,
    text: String,
    pass: bool,
}

impl Outcome {
    fn ok(report: Value, text: String) -> Self {
        Outcome { report, text, pass: true }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{}", json!({ "error": e.kind().to_string(), "detail": e.to_string().trim() }));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let mut report = out.report;
            if let Value::Object(m) = &mut report {
                m.insert("version".into(), json!(ARTIFACT_VERSION));
            }
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string(&report).expect("reports serialize")),
                Format::Text => print!("{}", out.text),
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("{}", json!({ "error": format!("{:#}", f.error) }));
            ExitCode::from(if f.input { 2 } else { 1 })
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_array(path: &Path) -> anyhow::Result<ExteriorArray<BigRational>> {
    Ok(formats::parse_array(&read(path)?).with_context(|| format!("array in {}", path.display()))?)
}

/// A Hessian from either a matrix document (`rows`) or an array document
/// (`entries`), the latter assembled at the chart origin.
fn load_hessian(path: &Path) -> anyhow::Result<HessianMatrix<BigRational>> {
    let text = read(path)?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let h = if v.get("entries").is_some() {
        assemble(&Rationals, &formats::parse_array(&text)?)?
    } else {
        formats::parse_hessian(&text)?
    };
    Ok(h)
}

fn load_point(path: Option<&Path>, k: usize, n: usize) -> anyhow::Result<Matrix<BigRational>> {
    let Some(path) = path else {
        return Ok(zero_chart(&Rationals, k, n));
    };
    let v = read_json(path)?;
    let rows = v.get("rows").and_then(Value::as_array).context("chart point needs a `rows` array")?;
    let parsed: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.as_array()
                .context("each row must be an array")?
                .iter()
                .map(|s| Ok(parse_rational(s.as_str().context("entries must be strings")?)?))
                .collect::<anyhow::Result<_>>()
        })
        .collect::<anyhow::Result<_>>()?;
    let m = Matrix::from_rows(parsed)?;
    if m.rows() != k || m.cols() != n - k {
        bail!("chart point must be {k}x{}, got {}x{}", n - k, m.rows(), m.cols());
    }
    Ok(m)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn checksums() -> Value {
    to_value(&certificates::embedded_checksums())
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let seed = cli.seed;
    match &cli.command {
        Command::Hessian { input, at, symbolic, k, n } => {
            if *symbolic {
                let (k, n) = (k.expect("required"), n.expect("required"));
                if k < 2 || n <= k {
                    bail_input(format!("need 2 <= k < N, got k={k}, N={n}"))?;
                }
                let (h, names) = assemble_symbolic(k, n)?;
                let doc = matrix_to_json(k, n, h.matrix(), |p| p.to_string_with(&|v| names[v].clone()));
                let text = doc.rows.iter().map(|r| r.join("\t") + "\n").collect();
                return Ok(Outcome::ok(to_value(&doc), text));
            }
            let a = load_array(input.as_deref().expect("required"))?;
            let x = load_point(at.as_deref(), a.k(), a.n())?;
            let h = if at.is_some() { hessian_at(&a, &x)? } else { assemble(&Rationals, &a)? };
            let doc = hessian_to_json(&h);
            let text = doc.rows.iter().map(|r| r.join("\t") + "\n").collect();
            Ok(Outcome::ok(to_value(&doc), text))
        }
        Command::Det { input, method } => {
            let strategy = determinant_strategy(method)?;
            let h = load_hessian(input)?;
            let det = match integer_matrix(h.matrix()) {
                Ok(m) => BigRational::from_integer(strategy.det(&m)?),
                Err(_) if method == "bareiss" => det_rational(h.matrix())?,
                Err(e) => return Err(anyhow::Error::from(e).context(format!("method {method} needs integer entries")).into()),
            };
            let d = format_rational(&det);
            let text = format!("det = {d} ({method}, {0}x{0})\n", h.side());
            Ok(Outcome::ok(json!({ "k": h.k(), "N": h.n(), "side": h.side(), "method": method, "det": d }), text))
        }
        Command::Rank { input } => {
            let h = load_hessian(input)?;
            let rank = rank_rational(h.matrix());
            let mut report = json!({ "k": h.k(), "N": h.n(), "side": h.side(), "rank": rank, "corank": h.side() - rank });
            if let Ok(m) = integer_matrix(h.matrix()) {
                let hi = HessianMatrix::from_matrix(h.k(), h.n(), m)?;
                let rows: Vec<usize> = (1..=h.k()).map(|i| block_row_rank(&hi, i)).collect();
                report["block_row_ranks"] = json!(rows);
            }
            let text = format!("rank {rank} of {}, corank {}\n", h.side(), h.side() - rank);
            Ok(Outcome::ok(report, text))
        }
        Command::Degrees { k, n } => {
            let f = feasible_degrees(*k, *n)?;
            let text = format!("(k, N) = ({k}, {n}), total {}: {:?}\n", f.total, f.degrees);
            Ok(Outcome::ok(to_value(&f), text))
        }
        Command::Irreducible { k, n, max, rules } => {
            let rules = match rules {
                Some(r) => select_rules(r)?,
                None => grassdual::irreducibility::default_rules(),
            };
            let mut engine = Engine::new(KnownFactorTable::seeded(), rules);
            let steps = match max {
                Some(m) => {
                    if m < n {
                        bail_input(format!("--max {m} is below --N {n}"))?;
                    }
                    run_schedule(&mut engine, *k, *m)?.into_iter().filter(|s| s.n >= *n).collect()
                }
                None => {
                    engine.step_for(*k, *n)?;
                    engine.trace().to_vec()
                }
            };
            let text = steps
                .iter()
                .map(|s| {
                    let mut line = format!("({}, {}) total {} [{}] {}", s.k, s.n, s.total, s.source, s.verdict);
                    if !s.note.is_empty() {
                        line.push_str(&format!(": {}", s.note));
                    }
                    for e in s.embeddings.iter().filter(|e| e.pattern.is_some()) {
                        line.push_str(&format!("\n  {} {} -> {:?}", e.rule, e.description, e.pattern.as_ref().unwrap()));
                    }
                    line.push_str(&format!("\n  survivors {:?}\n", s.survivors));
                    line
                })
                .collect();
            let verdicts: Vec<Value> = steps.iter().map(|s| json!([s.k, s.n, s.verdict])).collect();
            Ok(Outcome::ok(json!({ "k": k, "N": n, "verdicts": verdicts, "steps": to_value(&steps) }), text))
        }
        Command::Specialize { left, right } => {
            let (h1, h2) = (load_hessian(left)?, load_hessian(right)?);
            let h = specialize_embed(&Rationals, &h1, &h2)?;
            let (d1, d2, d) = (det_rational(h1.matrix())?, det_rational(h2.matrix())?, det_rational(h.matrix())?);
            let prod = &d1 * &d2;
            let sign = if d == prod { 1 } else if d == -prod.clone() { -1 } else { 0 };
            let text = format!(
                "H_{{{},{}}}: det {} = {} x det {} x det {}\n",
                h.k(),
                h.n(),
                format_rational(&d),
                sign,
                format_rational(&d1),
                format_rational(&d2)
            );
            let report = json!({
                "matrix": to_value(&hessian_to_json(&h)),
                "det": format_rational(&d),
                "det_left": format_rational(&d1),
                "det_right": format_rational(&d2),
                "sign": sign,
            });
            Ok(Outcome { report, text, pass: sign != 0 })
        }
        Command::Duality { input, k, n, trials } => {
            if let Some(path) = input {
                let a = load_array(path)?;
                let b = dual_array(&Rationals, &a)?;
                let h = assemble(&Rationals, &a)?;
                let hb = assemble(&Rationals, &b)?;
                let (d, db) = (det_rational(h.matrix())?, det_rational(hb.matrix())?);
                let reordered = apply_duality(&h) == hb;
                let pass = reordered && d == db;
                let report = json!({
                    "dual": to_value(&formats::array_to_json(&b)),
                    "det": format_rational(&d),
                    "det_dual": format_rational(&db),
                    "reordering_matches": reordered,
                    "pass": pass,
                });
                let text = format!(
                    "det H_{{{},{}}} = {}, det H_{{{},{}}} = {}, reordering matches: {reordered}\n",
                    a.k(),
                    a.n(),
                    format_rational(&d),
                    b.k(),
                    b.n(),
                    format_rational(&db)
                );
                return Ok(Outcome { report, text, pass });
            }
            let (Some(k), Some(n)) = (k, n) else {
                return Err(anyhow::anyhow!("give --input or both --k and --N").into());
            };
            let r = checks::duality_check(*k, *n, *trials, seed)?;
            let text = format!(
                "({k}, {n}) -> ({}, {n}): pattern {} ({}), {}/{} determinants equal\n",
                n - k,
                r.symbolic_pattern,
                r.symbolic_detail,
                r.trials_equal,
                r.trials
            );
            Ok(Outcome { pass: r.pass, report: to_value(&r), text })
        }
        Command::Node { k, n, j, t, symbolic } => node_command(*k, *n, j, t.as_deref(), *symbolic),
        Command::VerifyCertificates { id, input, export } => {
            let certs = match (id, input) {
                (_, Some(path)) => vec![certificates::import(path)?],
                (Some(id), None) => vec![certificates::load(id)?],
                (None, None) => certificates::certificate_ids()
                    .into_iter()
                    .map(certificates::load)
                    .collect::<Result<_, _>>()?,
            };
            if let Some(dir) = export {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                for c in &certs {
                    certificates::export(c, &dir.join(format!("{}.json", c.id)))?;
                }
            }
            let reports: Vec<CertificateReport> = certs
                .iter()
                .map(|c| certificates::verify_certificate(c, seed))
                .collect::<Result<_, _>>()
                .map_err(|e| Failure { input: false, error: e.into() })?;
            let pass = reports.iter().all(|r| r.pass);
            let mut text = String::new();
            for r in &reports {
                text.push_str(&format!("{} {} ({}, k={}, N={})\n", if r.pass { "PASS" } else { "FAIL" }, r.id, r.kind.name(), r.k, r.n));
                for c in r.checks.iter().filter(|c| !c.pass) {
                    text.push_str(&format!("  {}: {}\n", c.name, c.detail));
                }
            }
            eprintln!("{}/{} certificates pass", reports.iter().filter(|r| r.pass).count(), reports.len());
            let report = json!({ "pass": pass, "checksums": checksums(), "reports": to_value(&reports) });
            Ok(Outcome { report, text, pass })
        }
        Command::VerifyNode { id } => {
            let c = certificates::load(id)?;
            if c.kind != CertificateKind::Nodepair {
                bail_input(format!("{id} is a {} certificate, not a node pair", c.kind.name()))?;
            }
            let r = certificates::verify_certificate(&c, seed).map_err(|e| Failure { input: false, error: e.into() })?;
            let mut text = format!("{} {}\n", if r.pass { "PASS" } else { "FAIL" }, r.id);
            if let Some(nr) = &r.node {
                for (name, cond) in [
                    ("(i)", &nr.condition_i),
                    ("(ii)", &nr.condition_ii),
                    ("(iii)", &nr.condition_iii),
                    ("(iv)", &nr.condition_iv),
                    ("(iv) literal", &nr.condition_iv_literal),
                ] {
                    text.push_str(&format!("  {name}: {}", cond.holds));
                    if let Some(v) = cond.violations.first() {
                        text.push_str(&format!(" ({} violations, first: {v})", cond.violations.len()));
                    }
                    text.push('\n');
                }
                text.push_str(&format!(
                    "  common array: {}\n  det H(x0) = {}\n  det H(x') = {}\n  completion seed: {:?} after {} tries\n",
                    nr.common_array, nr.det_a, nr.det_b, nr.seed_used, nr.seeds_tried
                ));
            }
            let mut checks = Map::new();
            checks.insert(id.clone(), json!(r.checksum));
            let pass = r.pass;
            Ok(Outcome { report: json!({ "pass": pass, "checksums": checks, "report": to_value(&r) }), text, pass })
        }
        Command::IdentityH36 { trials, skip_symbolic } => {
            let r = checks::identity_h36(*trials, seed, !skip_symbolic)?;
            let text = format!(
                "symbolic: {}\npoints: {}/{} agree mod {}\n",
                match r.symbolic_zero {
                    Some(true) => "difference is the zero polynomial".to_string(),
                    Some(false) => "difference is NOT zero".to_string(),
                    None => "skipped".to_string(),
                },
                r.trials_agreeing,
                r.trials,
                r.prime
            );
            Ok(Outcome { pass: r.pass, report: to_value(&r), text })
        }
        Command::Critical { input, at } => {
            let a = load_array(input)?;
            let x = load_point(at.as_deref(), a.k(), a.n())?;
            let critical = is_critical(&Rationals, &a, &x)?;
            let h = hessian_at(&a, &x)?;
            let det = det_rational(h.matrix())?;
            let rank = rank_rational(h.matrix());
            let text = format!("critical: {critical}\nHessian det {} (rank {rank} of {})\n", format_rational(&det), h.side());
            let report = json!({
                "k": a.k(), "N": a.n(), "critical": critical,
                "hessian_det": format_rational(&det), "hessian_rank": rank, "side": h.side(),
            });
            Ok(Outcome::ok(report, text))
        }
    }
}

fn bail_input(msg: String) -> Result<(), Failure> {
    Err(Failure { input: true, error: anyhow::anyhow!(msg) })
}

fn format_laurent(f: &LaurentForm) -> String {
    if f.is_zero() {
        return "0".into();
    }
    f.terms()
        .iter()
        .map(|(e, l)| match e {
            0 => format!("({})", format_linear_form(l)),
            1 => format!("T ({})", format_linear_form(l)),
            _ => format!("T^{e} ({})", format_linear_form(l)),
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn node_command(k: usize, n: usize, j: &[usize], t: Option<&str>, symbolic: bool) -> Result<Outcome, Failure> {
    if j.len() != k {
        bail_input(format!("J has {} entries, expected k = {k}", j.len()))?;
    }
    let js = NodeIndexSet::from_values(j, n)?;
    if js.k() != k {
        bail_input("J does not match k".into())?;
    }
    let mut report = json!({ "k": k, "N": n, "J": js.j().values() });
    let mut text = format!("J = {:?}\n", js.j().values());
    let point = if let Some(t) = t.filter(|_| !symbolic) {
        let tv = parse_rational(t)?;
        let x = node::build_x_j_t(&NodePointSpec { j: js.clone(), t: TValue::Numeric(tv) })?;
        x.to_rows().iter().map(|r| r.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>()
    } else {
        node::x_j_t_display(&js)
    };
    text.push_str("x(J, T):\n");
    for r in &point {
        text.push_str(&format!("  [{}]\n", r.join(", ")));
    }
    report["x"] = json!(point);
    let forms = node::defining_forms_at(&js)?;
    let normalized: Vec<String> = forms.forms.iter().map(|f| format_laurent(&f.normalized())).collect();
    let (limit, _) = node::limit_forms(&js)?;
    let limit_text: Vec<String> = limit.iter().map(format_linear_form).collect();
    let lr = node::limit_report(&js).map_err(|e| Failure { input: false, error: e.into() })?;
    text.push_str(&format!("{} defining forms, {} limit forms\n", normalized.len(), limit_text.len()));
    for l in &limit_text {
        text.push_str(&format!("  {l}\n"));
    }
    text.push_str(&format!(
        "limit rank {}, expected rank {}, joint rank {}, spans equal: {}\n",
        lr.limit_rank, lr.expected_rank, lr.joint_rank, lr.spans_equal
    ));
    report["forms"] = json!(normalized);
    report["limit_forms"] = json!(limit_text);
    report["limit"] = to_value(&lr);
    Ok(Outcome { pass: lr.spans_equal, report, text })
}
