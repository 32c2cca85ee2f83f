//! End-to-end verification: recomputes everything for one configuration and
//! checks every structural property, producing one line per check tagged with
//! the acceptance criterion it belongs to.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::afun::{self, StructCoeffTables};
use crate::canonical::{self, CanonicalData, CanonicalError, MAX_CHAIN_INVERSION};
use crate::insertion::{self, Tableau};
use crate::kl::{KlError, KlTable, DEFAULT_MAX_RANK, EXTENDED_MAX_RANK};
use crate::matrix::SparseOperator;
use crate::module::{check_hecke_relations, hs_operator, underline_hs_operator, ModuleKind};
use crate::perm::{self, Perm};
use crate::qpset::{QpError, QpSet};
use crate::wgraph::{self, LabeledGraph, Partition};

/// Largest rank of the regular set the pipeline accepts.
pub const REGULAR_MAX_RANK: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    Warn,
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Warn => "WARN",
            Status::Info => "INFO",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckLine {
    pub criterion: u8,
    pub scope: String,
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub lines: Vec<CheckLine>,
}

impl VerifyReport {
    fn push(&mut self, criterion: u8, scope: &str, name: &str, status: Status, detail: impl Into<String>) {
        self.lines.push(CheckLine {
            criterion,
            scope: scope.to_string(),
            name: name.to_string(),
            status,
            detail: detail.into(),
        });
    }

    fn check(&mut self, criterion: u8, scope: &str, name: &str, ok: bool, detail: impl Into<String>) {
        self.push(criterion, scope, name, if ok { Status::Pass } else { Status::Fail }, detail);
    }

    fn check_violations(&mut self, criterion: u8, scope: &str, name: &str, checked: usize, violations: &[String]) {
        let detail = match violations.first() {
            None => format!("{checked} checked"),
            Some(first) => format!("{} of {checked} fail, e.g. {first}", violations.len()),
        };
        self.check(criterion, scope, name, violations.is_empty(), detail);
    }

    pub fn extend(&mut self, other: VerifyReport) {
        self.lines.extend(other.lines);
    }

    /// No line failed.
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.status != Status::Fail)
    }

    /// Worst status among the lines of one criterion, if it has any lines.
    pub fn criterion_status(&self, criterion: u8) -> Option<Status> {
        let mut lines = self.lines.iter().filter(|l| l.criterion == criterion).peekable();
        lines.peek()?;
        let mut worst = Status::Pass;
        for l in lines {
            match l.status {
                Status::Fail => return Some(Status::Fail),
                Status::Warn => worst = Status::Warn,
                _ => {}
            }
        }
        Some(worst)
    }

    /// Fixed-width table, one line per check.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            out.push_str(&format!("[{}] C{} {:<12} {:<34} {}\n", l.status, l.criterion, l.scope, l.name, l.detail));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SetChoice {
    Fpf,
    Regular,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub n: usize,
    pub set: SetChoice,
    pub kinds: Vec<ModuleKind>,
    /// For the regular set: verify ranks `1..=min(n, max)`.
    pub max: Option<usize>,
    pub allow_n8: bool,
}

impl VerifyConfig {
    pub fn fpf(n: usize) -> Self {
        Self { n, set: SetChoice::Fpf, kinds: ModuleKind::BOTH.to_vec(), max: None, allow_n8: false }
    }

    pub fn regular(n: usize) -> Self {
        Self { n, set: SetChoice::Regular, kinds: ModuleKind::BOTH.to_vec(), max: None, allow_n8: false }
    }

    /// Largest accepted rank for this configuration.
    pub fn rank_cap(&self) -> usize {
        match self.set {
            SetChoice::Fpf if self.allow_n8 => EXTENDED_MAX_RANK,
            SetChoice::Fpf => DEFAULT_MAX_RANK,
            SetChoice::Regular => REGULAR_MAX_RANK,
        }
    }

    /// Rejects configurations the pipeline cannot run.
    pub fn validate(&self) -> Result<(), VerifyError> {
        if self.n == 0 {
            return Err(VerifyError::Usage("rank must be at least 1".into()));
        }
        if self.set == SetChoice::Fpf && self.n % 2 == 1 {
            return Err(VerifyError::Usage(format!("fixed-point-free involutions need an even rank, got {}", self.n)));
        }
        let cap = self.rank_cap();
        let effective = match self.set {
            SetChoice::Fpf => self.n,
            SetChoice::Regular => self.n.min(self.max.unwrap_or(self.n)),
        };
        if effective > cap {
            let hint =
                if self.set == SetChoice::Fpf && effective <= EXTENDED_MAX_RANK { " (pass --allow-n8)" } else { "" };
            return Err(VerifyError::Usage(format!("rank {effective} exceeds the maximum {cap}{hint}")));
        }
        if self.kinds.is_empty() {
            return Err(VerifyError::Usage("no module kind selected".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Set(#[from] QpError),
    #[error(transparent)]
    Canonical(#[from] CanonicalError),
    #[error("Kazhdan–Lusztig table: {0}")]
    Kl(String),
}

impl From<KlError> for VerifyError {
    fn from(e: KlError) -> Self {
        VerifyError::Kl(e.to_string())
    }
}

/// Supplies Kazhdan–Lusztig tables, e.g. from a disk cache.
pub type KlSource<'a> = dyn FnMut(usize) -> Result<Arc<KlTable>, VerifyError> + 'a;

/// Computes tables in memory without caching.
pub fn compute_kl(n: usize) -> Result<Arc<KlTable>, VerifyError> {
    Ok(Arc::new(KlTable::compute(n, EXTENDED_MAX_RANK)?))
}

/// Runs the pipeline for one configuration.
pub fn run(cfg: &VerifyConfig, kl: &mut KlSource<'_>) -> Result<VerifyReport, VerifyError> {
    cfg.validate()?;
    let mut report = VerifyReport::default();
    report.extend(quasiparabolic_examples());
    match cfg.set {
        SetChoice::Fpf => report.extend(verify_fpf(cfg.n, &cfg.kinds, kl)?),
        SetChoice::Regular => {
            for rank in 1..=cfg.n.min(cfg.max.unwrap_or(cfg.n)) {
                report.extend(verify_regular(rank, &cfg.kinds, kl)?);
            }
        }
    }
    Ok(report)
}

/// The axiom checker passes the fixed-point-free sets and flags the class of
/// a simple reflection in `S_3`.
pub fn quasiparabolic_examples() -> VerifyReport {
    let mut rep = VerifyReport::default();
    let class = QpSet::conjugacy_class(&Perm::simple(3, 1).expect("valid generator"));
    let r = class.check_quasiparabolic();
    rep.check(
        6,
        "class-of-213",
        "QP checker flags non-QP class",
        !r.holds,
        format!(
            "{} violations, e.g. {}",
            r.violations.len(),
            r.violations.first().map(ToString::to_string).unwrap_or_default()
        ),
    );
    rep
}

/// Everything computed for one set and module kind.
pub struct ModuleRun {
    pub data: CanonicalData,
    pub graph: LabeledGraph,
    pub cells: Partition,
    pub molecules: Partition,
    pub tables: Option<StructCoeffTables>,
}

fn scope(set: &QpSet, kind: ModuleKind) -> String {
    format!("{}/{kind}", set.name())
}

/// Criteria 4 and 5 for one set and kind; criterion 6 observations.
pub fn verify_module(
    set: &QpSet,
    kind: ModuleKind,
    kl: Option<&KlTable>,
    rep: &mut VerifyReport,
) -> Result<ModuleRun, VerifyError> {
    let sc = scope(set, kind);
    let sc = sc.as_str();
    let d = set.len();

    // r-polynomials
    let r = canonical::compute_r(kind, set);
    let bad = canonical::check_r_well_defined(kind, set, &r);
    rep.check(5, sc, "r independent of lowering choice", bad.is_empty(), format!("{} disagreements", bad.len()));
    rep.check(5, sc, "bar involution bar(R)R = I", r.bar().mul(&r).is_identity(), format!("{d}x{d}"));
    let mut lead_bad = Vec::new();
    let mut parity_bad = Vec::new();
    let mut inexact_leads = 0;
    for y in 0..d {
        for x in 0..d {
            let p = &r[(y, x)];
            let related = set.leq(y, x);
            if p.is_zero() {
                if related && kind == ModuleKind::M {
                    lead_bad.push(format!("r({}, {}) vanishes", set.element(y), set.element(x)));
                }
                continue;
            }
            if !related {
                lead_bad.push(format!("r({}, {}) nonzero off the order", set.element(y), set.element(x)));
                continue;
            }
            let gap = set.height_gap(y, x);
            if !p.has_exponent_parity(gap.rem_euclid(2)) {
                parity_bad.push(format!("r({}, {}) = {p}", set.element(y), set.element(x)));
            }
            let exact = p.degree() == Some(gap) && p.leading_coeff() == 1.into();
            match kind {
                ModuleKind::M if !exact => lead_bad.push(format!("r({}, {}) = {p}", set.element(y), set.element(x))),
                ModuleKind::N if p.degree().is_some_and(|k| k > gap) => {
                    lead_bad.push(format!("r({}, {}) = {p}", set.element(y), set.element(x)))
                }
                ModuleKind::N if !exact => inexact_leads += 1,
                _ => {}
            }
        }
    }
    let lead_name = match kind {
        ModuleKind::M => "r leading term v^gap",
        ModuleKind::N => "r degree <= height gap",
    };
    rep.check_violations(5, sc, lead_name, d * d, &lead_bad);
    rep.check_violations(5, sc, "r parity", d * d, &parity_bad);
    if kind == ModuleKind::N {
        rep.push(6, sc, "r with leading term != v^gap", Status::Info, format!("{inexact_leads} entries"));
    }

    // canonical basis, two ways
    let c = canonical::compute_canonical_solve(set, &r)?;
    let inv = canonical::invert(set, &c);
    let recurrence = canonical::compute_canonical_recurrence(kind, set);
    rep.check(4, sc, "solve = recurrence", c == recurrence, format!("{d}x{d} entries"));
    rep.check(4, sc, "inverse is two-sided", inv.mul(&c).is_identity() && c.mul(&inv).is_identity(), "");
    if d <= MAX_CHAIN_INVERSION {
        let chains = canonical::invert_by_chains(set, &c)?;
        rep.check(4, sc, "back-substitution = chain sum", chains == inv, format!("{d}x{d} entries"));
    } else {
        rep.push(4, sc, "back-substitution = chain sum", Status::Info, format!("skipped: {d} > {MAX_CHAIN_INVERSION}"));
    }
    let data = CanonicalData::compute(kind, set)?;
    debug_assert_eq!(data.c, c);

    let mut par_bad = Vec::new();
    for x in 0..d {
        for y in 0..d {
            if !set.leq(x, y) {
                continue;
            }
            let gap = set.height_gap(x, y);
            let t = data.c[(x, y)].shift(gap);
            let ok = t.has_exponent_parity(0)
                && (kind == ModuleKind::N || t.coeff_i64(0) == 1)
                && (gap % 2 != 0 || data.mu(x, y) == 0);
            if !ok {
                par_bad.push(format!("({}, {}): {}", set.element(x), set.element(y), data.c[(x, y)]));
            }
        }
    }
    rep.check_violations(5, sc, "canonical parity, mu on even gaps", d * d, &par_bad);

    let mut mu_bad = Vec::new();
    let mut mu_checked = 0;
    for x in 0..d {
        for y in 0..d {
            if x == y {
                continue;
            }
            for i in 1..set.rank() {
                let applies = match kind {
                    ModuleKind::M => set.step(i, y).is_le() && set.step(i, x).is_gt(),
                    ModuleKind::N => set.step(i, y).is_lt() && set.step(i, x).is_ge(),
                };
                if applies {
                    mu_checked += 1;
                    if data.mu(x, y) != i64::from(set.gen(i, x) == y) {
                        mu_bad.push(format!("mu({}, {}) = {}", set.element(x), set.element(y), data.mu(x, y)));
                    }
                }
            }
        }
    }
    rep.check_violations(5, sc, "mu characterization", mu_checked, &mu_bad);

    // operators
    let ops: Vec<SparseOperator> = (1..set.rank()).map(|i| hs_operator(kind, set, i)).collect();
    let rel = check_hecke_relations(&ops);
    rep.check(5, sc, "module quadratic + braid", rel.holds(), rel.violations.join("; "));
    let mult_ok = (1..set.rank()).all(|i| {
        underline_hs_operator(kind, set, i).mul_dense(&data.c)
            == data.c.mul(&data.underline_hs_canonical(set, i).to_dense())
    });
    rep.check(5, sc, "multiplication formula", mult_ok, "");

    // graph
    let graph = wgraph::build_graph(set, &data);
    let adm = wgraph::check_quasi_admissible(&graph);
    rep.check(5, sc, "quasi-admissible", adm.holds(), adm.violations.first().cloned().unwrap_or_default());
    let ax = wgraph::check_wgraph_axiom(&graph);
    rep.check(5, sc, "W-graph quadratic + braid", ax.holds(), ax.violations.join("; "));
    let bad = wgraph::check_realizes_module(set, &data, &graph);
    rep.check(5, sc, "graph operators = canonical action", bad.is_empty(), format!("failing generators {bad:?}"));
    let arrows = wgraph::arrows_via_module(set, &data);
    let mut tau_bad = Vec::new();
    let mut arrow_bad = Vec::new();
    for x in 0..d {
        for y in 0..d {
            if x == y {
                continue;
            }
            if arrows[x][y] && graph.tau[x] & !graph.tau[y] == 0 {
                tau_bad.push(format!("{} -> {}", set.element(x), set.element(y)));
            }
            if arrows[x][y] != (graph.weight(x, y) != 0) {
                arrow_bad.push(format!("{} -> {}", set.element(x), set.element(y)));
            }
        }
    }
    rep.check_violations(5, sc, "tau-obstruction on arrows", d * d.saturating_sub(1), &tau_bad);
    rep.check_violations(5, sc, "module arrows = nonzero weights", d * d.saturating_sub(1), &arrow_bad);
    let cells = wgraph::cells(&graph);
    let molecules = wgraph::molecules(&graph);
    let refines = molecules.iter().all(|m| cells.iter().any(|c| m.iter().all(|x| c.contains(x))));
    rep.check(
        5,
        sc,
        "molecules refine cells",
        refines,
        format!("{} cells, {} molecules", cells.len(), molecules.len()),
    );

    // a-function
    let tables = match kl {
        None => {
            rep.push(5, sc, "a-function", Status::Warn, "skipped: the full operator table is too large at this rank");
            None
        }
        Some(kl) => {
            let t = StructCoeffTables::compute(set, &data, kl).map_err(|e| VerifyError::Kl(e.to_string()))?;
            for prop in [
                afun::check_descent_bound(set, &t),
                afun::check_extremes(set, &t),
                afun::check_monotone(&graph, &t),
                afun::check_constant_on_cells(set, &cells, &t),
                afun::check_orbit_bound(set, &t),
                afun::check_bound(set, &data, &t),
                afun::check_leading_transfer(set, &data, &t),
                afun::check_support(set, &graph, &t),
            ] {
                rep.check_violations(5, sc, &format!("a: {}", prop.name), prop.checked, &prop.violations);
            }
            let neg = afun::negative_coefficients(&t);
            rep.push(
                6,
                sc,
                "nonnegative structure coefficients",
                if neg == 0 { Status::Pass } else { Status::Warn },
                format!("{neg} coefficients with a negative term"),
            );
            let probes = afun::probe_conjectures(&graph, &cells, &t);
            rep.push(
                6,
                sc,
                "equal-a arrows stay in one cell",
                if probes.is_empty() { Status::Pass } else { Status::Warn },
                format!("{} counterexamples", probes.len()),
            );
            if kind == ModuleKind::N {
                let up = afun::increasing_edges(&graph, &t).len();
                let down = graph.edges.keys().filter(|&&(x, y)| t.a[y] < t.a[x]).count();
                rep.push(
                    6,
                    sc,
                    "a' along arrows (observed)",
                    Status::Info,
                    format!("{up} edges increase, {down} decrease"),
                );
            }
            Some(t)
        }
    };
    Ok(ModuleRun { data, graph, cells, molecules, tables })
}

/// All criteria for the fixed-point-free involutions of rank `n`.
pub fn verify_fpf(n: usize, kinds: &[ModuleKind], kl: &mut KlSource<'_>) -> Result<VerifyReport, VerifyError> {
    let mut rep = VerifyReport::default();
    let set = QpSet::fpf(n)?;
    let qp = set.check_quasiparabolic();
    rep.check(6, set.name(), "QP checker passes", qp.holds, format!("{} violations", qp.violations.len()));

    let table = if n <= DEFAULT_MAX_RANK { Some(kl(n)?) } else { None };
    let d = set.len();
    for &kind in kinds {
        let sc = scope(&set, kind);
        let run = verify_module(&set, kind, table.as_deref(), &mut rep)?;
        let tableau = |z: &Perm| -> Result<Tableau, VerifyError> {
            match kind {
                ModuleKind::M => insertion::p_rbs(z),
                ModuleKind::N => insertion::p_cbs(z),
            }
            .map_err(|e| VerifyError::Usage(e.to_string()))
        };
        let tabs: Vec<Tableau> = set.carrier().iter().map(tableau).collect::<Result<_, _>>()?;
        let shapes = wgraph::fibers(d, |x| tabs[x].shape());
        rep.check(
            1,
            &sc,
            "cells = molecules",
            run.cells == run.molecules,
            format!("{} cells, {} molecules", run.cells.len(), run.molecules.len()),
        );
        rep.check(1, &sc, "molecules = shape fibers", run.molecules == shapes, format!("{} shapes", shapes.len()));
        match &run.tables {
            Some(t) => {
                let bad: Vec<String> = (0..d)
                    .filter(|&x| t.a[x] != tabs[x].stat_a() as i32)
                    .map(|x| format!("{}: a = {}, A = {}", set.element(x), t.a[x], tabs[x].stat_a()))
                    .collect();
                rep.check_violations(2, &sc, "a = A(tableau)", d, &bad);
            }
            None => rep.push(2, &sc, "a = A(tableau)", Status::Warn, "skipped with the a-function"),
        }
    }
    rep.push(
        6,
        set.name(),
        "fpf section map on row tableaux",
        Status::Info,
        sigma_prime_observation(&set, insertion::p_rbs),
    );
    rep.push(
        6,
        set.name(),
        "fpf section map on column tableaux",
        Status::Info,
        sigma_prime_observation(&set, insertion::p_cbs),
    );
    Ok(rep)
}

/// How often the shortest fixed-point-free section map is defined on the
/// tableaux of one insertion, and how often it inverts that insertion.
fn sigma_prime_observation(set: &QpSet, insert: fn(&Perm) -> Result<Tableau, insertion::InsertionError>) -> String {
    let mut defined = 0;
    let mut section = 0;
    let mut same_shape = 0;
    let mut seen = std::collections::BTreeSet::new();
    for z in set.carrier() {
        let Ok(t) = insert(z) else { continue };
        if !seen.insert(t.clone()) {
            continue;
        }
        if let Ok(s) = insertion::sigma_prime_t(&t) {
            defined += 1;
            if let Ok(u) = insert(&s) {
                same_shape += usize::from(u.shape() == t.shape());
                section += usize::from(u == t);
            }
        }
    }
    format!(
        "defined on {defined}/{} tableaux; image keeps the shape on {same_shape}, is the same tableau on {section}",
        seen.len()
    )
}

/// Criteria 3–5 for the regular set of rank `n`.
pub fn verify_regular(n: usize, kinds: &[ModuleKind], kl: &mut KlSource<'_>) -> Result<VerifyReport, VerifyError> {
    let mut rep = VerifyReport::default();
    let set = QpSet::regular(n)?;
    let qp = set.check_quasiparabolic();
    rep.check(6, set.name(), "QP checker passes", qp.holds, format!("{} violations", qp.violations.len()));
    let table = kl(n)?;
    let d = set.len();
    for &kind in kinds {
        let sc = scope(&set, kind);
        let run = verify_module(&set, kind, Some(&table), &mut rep)?;
        let mut bad = Vec::new();
        for y in 0..d {
            for x in 0..d {
                if run.data.c[(y, x)] != table.h(set.element(y), set.element(x)) {
                    bad.push(format!("({}, {})", set.element(y), set.element(x)));
                }
            }
        }
        rep.check_violations(3, &sc, "canonical basis = KL basis", d * d, &bad);
        if kind == ModuleKind::M {
            let left = wgraph::fibers(d, |x| insertion::rsk_full(set.element(x)).1);
            rep.check(3, &sc, "cells = recording-tableau classes", run.cells == left, format!("{} cells", left.len()));
        }
    }
    Ok(rep)
}

/// Number of fixed-point-free involutions of rank `n`, `(n - 1)!!`.
pub fn fpf_count(n: usize) -> usize {
    perm::enumerate_fpf(n).map_or(0, |v| v.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        for cfg in [VerifyConfig::fpf(2), VerifyConfig::fpf(4), VerifyConfig::regular(3)] {
            let rep = run(&cfg, &mut compute_kl).unwrap();
            assert!(rep.passed(), "{}", rep.render());
        }
    }

    #[test]
    fn usage_errors() {
        assert!(matches!(VerifyConfig::fpf(5).validate(), Err(VerifyError::Usage(_))));
        assert!(matches!(VerifyConfig::fpf(8).validate(), Err(VerifyError::Usage(_))));
        let mut cfg = VerifyConfig::fpf(8);
        cfg.allow_n8 = true;
        assert!(cfg.validate().is_ok());
        assert!(matches!(VerifyConfig::regular(6).validate(), Err(VerifyError::Usage(_))));
        let mut cfg = VerifyConfig::regular(6);
        cfg.max = Some(3);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn criterion_status_is_worst() {
        let mut rep = VerifyReport::default();
        rep.push(1, "x", "a", Status::Pass, "");
        rep.push(1, "x", "b", Status::Warn, "");
        rep.push(2, "x", "c", Status::Fail, "");
        assert_eq!(rep.criterion_status(1), Some(Status::Warn));
        assert_eq!(rep.criterion_status(2), Some(Status::Fail));
        assert_eq!(rep.criterion_status(3), None);
        assert!(!rep.passed());
        assert_eq!(fpf_count(6), 15);
    }
}
