//! Acceptance criteria 1–7, one pass/fail line each. Runs without the test
//! harness so the lines are always printed; exits nonzero if any fails.

use std::collections::HashMap;
use std::process::ExitCode;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use quasicell_core::afun::StructCoeffTables;
use quasicell_core::kl::{KlTable, EXTENDED_MAX_RANK};
use quasicell_core::verify::{self, Status, VerifyConfig, VerifyError, VerifyReport};
use quasicell_core::{CanonicalData, ModuleKind, QpSet};

const FPF_RANKS: [usize; 2] = [4, 6];
const REGULAR_MAX: usize = 4;
const FPF6_BUDGET: Duration = Duration::from_secs(60);
const FPF4_BUDGET: Duration = Duration::from_secs(1);

#[derive(Default)]
struct Kl(Mutex<HashMap<usize, Arc<KlTable>>>);

impl Kl {
    fn get(&self, n: usize) -> Result<Arc<KlTable>, VerifyError> {
        let mut map = self.0.lock().unwrap();
        if let Some(t) = map.get(&n) {
            return Ok(t.clone());
        }
        let t = Arc::new(KlTable::compute(n, EXTENDED_MAX_RANK)?);
        map.insert(n, t.clone());
        Ok(t)
    }
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

fn criterion_lines(reports: &[&VerifyReport], c: u8) -> (usize, Vec<String>) {
    let lines: Vec<_> = reports.iter().flat_map(|r| r.lines.iter()).filter(|l| l.criterion == c).collect();
    let bad = lines
        .iter()
        .filter(|l| l.status == Status::Fail)
        .map(|l| format!("{} {}: {}", l.scope, l.name, l.detail))
        .collect();
    (lines.len(), bad)
}

struct Outcome {
    criterion: u8,
    pass: bool,
    detail: String,
}

fn outcome(criterion: u8, failures: Vec<String>, ok_detail: String) -> Outcome {
    match failures.first() {
        None => Outcome { criterion, pass: true, detail: ok_detail },
        Some(first) => {
            Outcome { criterion, pass: false, detail: format!("{} failures, first: {first}", failures.len()) }
        }
    }
}

fn main() -> ExitCode {
    let kl = Kl::default();
    let single = pool(1);

    // pipeline runs, single-threaded and timed
    let mut fpf = Vec::new();
    let mut timings = Vec::new();
    for n in FPF_RANKS {
        let start = Instant::now();
        let rep =
            single.install(|| verify::verify_fpf(n, &ModuleKind::BOTH, &mut |k| kl.get(k))).expect("pipeline runs");
        timings.push((n, start.elapsed()));
        fpf.push(rep);
    }
    let mut regular = Vec::new();
    for n in 1..=REGULAR_MAX {
        regular.push(
            single.install(|| verify::verify_regular(n, &ModuleKind::BOTH, &mut |k| kl.get(k))).expect("pipeline runs"),
        );
    }
    let examples = verify::quasiparabolic_examples();
    let all: Vec<&VerifyReport> = fpf.iter().chain(&regular).chain([&examples]).collect();

    let mut outcomes = Vec::new();

    // 1: cells = molecules = shape fibers, within the time budget at n = 6
    let (checked, mut bad) = criterion_lines(&all, 1);
    let t6 = timings.iter().find(|t| t.0 == 6).unwrap().1;
    if t6 > FPF6_BUDGET {
        bad.push(format!("n=6 pipeline took {t6:?}, budget {FPF6_BUDGET:?}"));
    }
    if checked != 2 * 2 * FPF_RANKS.len() {
        bad.push(format!("expected {} partition checks, found {checked}", 4 * FPF_RANKS.len()));
    }
    outcomes.push(outcome(
        1,
        bad,
        format!(
            "{checked} partition equalities at n = 4, 6; n=6 pipeline single-threaded within {}s",
            FPF6_BUDGET.as_secs()
        ),
    ));

    // 2: a = A∘P_rBS, a′ = A∘P_cBS, plus the explicit rank-4 values
    let (checked, mut bad) = criterion_lines(&all, 2);
    let set4 = QpSet::fpf(4).unwrap();
    let kl4 = kl.get(4).unwrap();
    for (kind, expected) in [(ModuleKind::M, [2, 2, 6]), (ModuleKind::N, [0, 2, 2])] {
        let data = CanonicalData::compute(kind, &set4).unwrap();
        let t = StructCoeffTables::compute(&set4, &data, &kl4).unwrap();
        if t.a != expected {
            bad.push(format!("fpf-4/{kind}: a = {:?}, expected {expected:?}", t.a));
        }
    }
    if checked != 2 * FPF_RANKS.len() {
        bad.push(format!("expected {} a-function checks, found {checked}", 2 * FPF_RANKS.len()));
    }
    outcomes.push(outcome(
        2,
        bad,
        "a and a' equal the tableau statistic for every element at n = 4, 6; n=4 values (2,2,6), (0,2,2)".into(),
    ));

    // 3: classical reduction on the regular set
    let (checked, bad) = criterion_lines(&all, 3);
    outcomes.push(outcome(3, bad, format!("{checked} checks on the regular set, ranks 1..={REGULAR_MAX}")));

    // 4 and 5: read off the pipeline reports
    let (checked, bad) = criterion_lines(&all, 4);
    outcomes.push(outcome(4, bad, format!("{checked} oracle comparisons")));
    let (checked, bad) = criterion_lines(&all, 5);
    outcomes.push(outcome(5, bad, format!("{checked} invariant suites")));

    // 6: observations; only the axiom checker can fail, probes only warn
    let (checked, bad) = criterion_lines(&all, 6);
    let warns =
        all.iter().flat_map(|r| r.lines.iter()).filter(|l| l.criterion == 6 && l.status == Status::Warn).count();
    outcomes.push(outcome(6, bad, format!("{checked} observations, {warns} warnings")));

    // 7: fast verify at n = 4 and worker-count independence
    let mut bad = Vec::new();
    let start = Instant::now();
    let quick = verify::run(&VerifyConfig::fpf(4), &mut verify::compute_kl).expect("pipeline runs");
    let t4 = start.elapsed();
    if t4 > FPF4_BUDGET {
        bad.push(format!("verify at n=4 took {t4:?}"));
    }
    if !quick.passed() {
        bad.push("verify at n=4 did not pass".into());
    }
    for cfg in [VerifyConfig::fpf(4), VerifyConfig::fpf(6), VerifyConfig::regular(4)] {
        let one = pool(1).install(|| verify::run(&cfg, &mut |k| kl.get(k))).unwrap();
        let four = pool(4).install(|| verify::run(&cfg, &mut |k| kl.get(k))).unwrap();
        if one != four {
            bad.push(format!("{:?} rank {}: reports differ between 1 and 4 workers", cfg.set, cfg.n));
        }
    }
    let set6 = QpSet::fpf(6).unwrap();
    for kind in ModuleKind::BOTH {
        let one = pool(1).install(|| CanonicalData::compute(kind, &set6)).unwrap();
        let four = pool(4).install(|| CanonicalData::compute(kind, &set6)).unwrap();
        if one.c != four.c || one.inv != four.inv {
            bad.push(format!("fpf-6/{kind}: canonical data differ between 1 and 4 workers"));
        }
    }
    outcomes.push(outcome(
        7,
        bad,
        format!("verify at n=4 within {}s; reports identical for 1 and 4 workers", FPF4_BUDGET.as_secs()),
    ));

    let mut ok = true;
    for o in &outcomes {
        ok &= o.pass;
        println!("criterion {}: {} - {}", o.criterion, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
