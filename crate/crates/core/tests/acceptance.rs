//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Time limits are part of each criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use grassdual::certificates::{verify, CertificateReport};
use grassdual::checks::{
    duality_check, equivariance, identity_h36, k2_parity, limit_span_sweep, line_restriction, specialization_check,
};
use grassdual::degree::feasible_degrees;
use grassdual::irreducibility::{run_schedule, Engine, ScheduleStep};

const SEED: u64 = 0;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn report(id: &str) -> Result<CertificateReport, String> {
    verify(id, SEED).map_err(|e| format!("{id}: {e}"))
}

fn corank_certificates() -> Outcome {
    let mut parts = Vec::new();
    for id in ["corank-3-9", "corank-3-10", "corank-3-11", "corank-4-8", "corank-4-9", "corank-5-10"] {
        let r = report(id)?;
        let side = r.k * (r.n - r.k);
        let rank = r.rank.ok_or(format!("{id}: no rank"))?;
        ensure(rank + 1 == side, format!("{id}: rank {rank} of {side}"))?;
        let rows = r.block_row_ranks.clone().unwrap_or_default();
        ensure(rows.len() == r.k && rows.iter().all(|&x| x == r.n - r.k), format!("{id}: block row ranks {rows:?}"))?;
        ensure(r.pass, format!("{id}: {:?}", r.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()))?;
        parts.push(format!("{id} {rank}/{side}"));
    }
    Ok(parts.join(", "))
}

fn invertible_certificate() -> Outcome {
    let r = report("invertible-4-8")?;
    let det = r.det.clone().ok_or("no determinant")?;
    ensure(det != "0", "determinant is zero")?;
    ensure(r.pass, format!("{:?}", r.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()))?;
    Ok(format!("det {det}"))
}

fn node_certificates() -> Outcome {
    let mut parts = Vec::new();
    for id in ["node-3-9", "node-3-10", "node-3-11"] {
        let r = report(id)?;
        let node = r.node.clone().ok_or(format!("{id}: no node report"))?;
        ensure(r.pass, format!("{id}: {:?}", r.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()))?;
        ensure(node.seeds_tried <= 8, format!("{id}: {} completion seeds", node.seeds_tried))?;
        ensure(node.det_a != "0" && node.det_b != "0", format!("{id}: singular Hessian"))?;
        parts.push(format!("{id} det {} / {}", node.det_a, node.det_b));
    }
    Ok(parts.join(", "))
}

fn h36_identity() -> Outcome {
    let t = Instant::now();
    let sym = identity_h36(1, SEED, true).map_err(|e| e.to_string())?;
    let sym_time = t.elapsed();
    ensure(sym.symbolic_zero == Some(true), "symbolic difference is not zero")?;
    ensure(sym_time < Duration::from_secs(300), format!("symbolic expansion took {sym_time:?}"))?;
    let t = Instant::now();
    let pts = identity_h36(20, SEED, false).map_err(|e| e.to_string())?;
    let pt_time = t.elapsed();
    ensure(pts.trials_agreeing == 20, format!("{}/20 points agree", pts.trials_agreeing))?;
    ensure(pt_time < Duration::from_secs(1), format!("points took {pt_time:?}"))?;
    Ok(format!("zero polynomial ({} terms, {sym_time:.2?}), 20/20 points ({pt_time:.2?})", sym.det_terms.unwrap_or(0)))
}

fn line_powers() -> Outcome {
    let mut parts = Vec::new();
    for (n, power, name) in [(6, 3, "cube"), (7, 2, "square")] {
        let mut slowest = Duration::ZERO;
        for trial in 0..20u64 {
            let t = Instant::now();
            let r = line_restriction(3, n, power, None, 1, SEED.wrapping_add(trial)).map_err(|e| e.to_string())?;
            slowest = slowest.max(t.elapsed());
            ensure(r.pass, format!("(3,{n}) line {trial} is not a {name}: {:?}", r.trials))?;
        }
        ensure(slowest < Duration::from_secs(5), format!("(3,{n}) slowest trial {slowest:?}"))?;
        parts.push(format!("(3,{n}) {name} on 20 lines, slowest {slowest:.2?}"));
    }
    Ok(parts.join(", "))
}

fn degree_arithmetic() -> Outcome {
    let want: [((usize, usize), &[usize]); 5] =
        [((3, 6), &[3, 6, 9]), ((3, 7), &[6, 12]), ((3, 8), &[15]), ((3, 10), &[21]), ((5, 12), &[35])];
    for ((k, n), d) in want {
        let got = feasible_degrees(k, n).map_err(|e| e.to_string())?.degrees;
        ensure(got == d, format!("({k},{n}) gave {got:?}"))?;
    }
    Ok("5 tables match".into())
}

fn has_pattern(step: &ScheduleStep, p: &[usize]) -> bool {
    step.embeddings.iter().any(|e| e.pattern.as_deref() == Some(p))
}

fn irreducibility() -> Outcome {
    let mut engine = Engine::with_defaults();
    let k3 = run_schedule(&mut engine, 3, 20).map_err(|e| e.to_string())?;
    let k4 = run_schedule(&mut engine, 4, 16).map_err(|e| e.to_string())?;
    for s in k3.iter().chain(&k4).filter(|s| s.n >= 8) {
        ensure(s.verdict == "irreducible", format!("({},{}) is {}", s.k, s.n, s.verdict))?;
    }
    let s311 = k3.iter().find(|s| s.n == 11).ok_or("no (3,11) step")?;
    ensure(
        has_pattern(s311, &[15, 3, 3, 3]) && has_pattern(s311, &[6, 6, 6, 6]),
        "(3,11) patterns differ",
    )?;
    engine.step_for(5, 11).map_err(|e| e.to_string())?;
    let s511 = engine.trace().iter().find(|s| (s.k, s.n) == (5, 11)).ok_or("no (5,11) step")?;
    ensure(s511.verdict == "irreducible", format!("(5,11) is {}", s511.verdict))?;
    ensure(
        has_pattern(s511, &[15, 15]) && has_pattern(s511, &[18, 3, 3, 3, 3]),
        "(5,11) patterns differ",
    )?;
    Ok("k=3 N=8..20, k=4 N=8..16, (5,11) irreducible".into())
}

fn duality() -> Outcome {
    let mut parts = Vec::new();
    for n in [7, 8] {
        let r = duality_check(3, n, 10, SEED).map_err(|e| e.to_string())?;
        ensure(r.pass, format!("(3,{n}): {r:?}"))?;
        parts.push(format!("(3,{n}) {}, {}/10 dets equal", r.symbolic_detail, r.trials_equal));
    }
    Ok(parts.join(", "))
}

fn specialization() -> Outcome {
    let mut parts = Vec::new();
    for (k, a, b) in [(3, 6, 6), (4, 6, 8)] {
        let r = specialization_check(k, a, b, 20, SEED).map_err(|e| e.to_string())?;
        ensure(r.pass, format!("({k}, {a}+{b}): {r:?}"))?;
        parts.push(format!("({k}, {a}+{b}) 20/20 signs {:?}", r.signs));
    }
    Ok(parts.join(", "))
}

fn limit_spans() -> Outcome {
    let mut parts = Vec::new();
    for (k, n, lo, hi) in [(3, 7, 0, 0), (4, 8, 0, 1), (4, 9, 0, 1), (4, 8, 2, 2)] {
        let r = limit_span_sweep(k, n, lo, hi).map_err(|e| e.to_string())?;
        ensure(r.pass, format!("({k},{n}) overlap {lo}..{hi}: {}/{} equal", r.spans_equal, r.sets))?;
        parts.push(format!("({k},{n})[{lo}..{hi}] {}", r.sets));
    }
    Ok(parts.join(", "))
}

fn parity() -> Outcome {
    let rows = k2_parity(&[4, 5, 6, 7, 8, 9], 10, SEED).map_err(|e| e.to_string())?;
    for r in &rows {
        ensure(r.pass, format!("N={}: {} of {} nonzero", r.n, r.nonzero, r.trials))?;
    }
    Ok(rows.iter().map(|r| format!("N={} {}/10 nonzero", r.n, r.nonzero)).collect::<Vec<_>>().join(", "))
}

fn zeroed_block_square() -> Outcome {
    let r = line_restriction(4, 8, 2, Some((3, 4)), 20, SEED).map_err(|e| e.to_string())?;
    ensure(r.pass, format!("{}/20 squares", r.powers))?;
    Ok("square on 20 lines".into())
}

fn translation_equivariance() -> Outcome {
    let r = equivariance(&[(3, 6), (3, 7), (4, 8)], 50, SEED).map_err(|e| e.to_string())?;
    ensure(r.pass, format!("{r:?}"))?;
    Ok(format!("50/50, {} planted critical points found", r.critical_found))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 13] = [
        ("corank certificates", 10, corank_certificates),
        ("invertible certificate", 1, invertible_certificate),
        ("node certificates", 30, node_certificates),
        ("H36 determinant identity", 301, h36_identity),
        ("line restriction cube/square", 200, line_powers),
        ("degree arithmetic", 1, degree_arithmetic),
        ("irreducibility engine", 10, irreducibility),
        ("duality", 10, duality),
        ("specialization multiplicativity", 10, specialization),
        ("limit spans", 60, limit_spans),
        ("k = 2 parity", 5, parity),
        ("zeroed-block square", 30, zeroed_block_square),
        ("translation equivariance", 30, translation_equivariance),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = f();
        let dt = t.elapsed();
        let out = match out {
            Ok(d) if dt > Duration::from_secs(*limit) => Err(format!("{d}; took {dt:.2?}, limit {limit}s")),
            o => o,
        };
        match out {
            Ok(detail) => println!("PASS {:>2} {name} ({dt:.2?}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({dt:.2?}): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
