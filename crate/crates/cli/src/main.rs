use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use quasicell_core::afun::StructCoeffTables;
use quasicell_core::insertion;
use quasicell_core::kl::KlTable;
use quasicell_core::perm;
use quasicell_core::verify::{self, SetChoice, Status, VerifyConfig, VerifyError};
use quasicell_core::wgraph;
use quasicell_core::{CanonicalData, ModuleKind, Perm, QpSet};
use serde_json::{json, Value};

mod cache;
mod export;

use cache::KlCache;

#[derive(Parser)]
#[command(name = "quasicell", version, about = "Canonical bases, W-graphs, cells and a-functions on involutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory for cached Kazhdan–Lusztig tables; QUASICELL_CACHE overrides it.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    output: Option<Output>,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical-basis matrices, their inverses and μ-tables.
    Canonical(SetArgs),
    /// W-graphs with their cells and molecules.
    Graph(SetArgs),
    /// a-function tables.
    Afun(SetArgs),
    /// Insertion tableaux of involutions.
    Insert(InsertArgs),
    /// Runs every check and prints a pass/fail table.
    Verify(SetArgs),
}

#[derive(clap::Args)]
struct SetArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = SetArg::Fpf)]
    set: SetArg,
    #[arg(long, value_enum, default_value_t = KindArg::Both)]
    kind: KindArg,
    /// Allow rank 8 for the fixed-point-free set.
    #[arg(long)]
    allow_n8: bool,
    /// Largest rank verified on the regular set.
    #[arg(long)]
    max: Option<usize>,
}

#[derive(clap::Args)]
struct InsertArgs {
    /// Involutions in one-line notation; all of the set's elements if omitted.
    perms: Vec<String>,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SetArg {
    Fpf,
    Regular,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    M,
    N,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
    Dot,
}

enum CliError {
    Usage(String),
    Failure(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Failure(e)
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Usage(msg) => CliError::Usage(msg),
            other => CliError::Failure(other.into()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

impl SetArgs {
    fn config(&self) -> CliResult<VerifyConfig> {
        let cfg = VerifyConfig {
            n: self.n,
            set: match self.set {
                SetArg::Fpf => SetChoice::Fpf,
                SetArg::Regular => SetChoice::Regular,
            },
            kinds: match self.kind {
                KindArg::M => vec![ModuleKind::M],
                KindArg::N => vec![ModuleKind::N],
                KindArg::Both => ModuleKind::BOTH.to_vec(),
            },
            max: self.max,
            allow_n8: self.allow_n8,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn build_set(&self, cfg: &VerifyConfig) -> CliResult<QpSet> {
        let set = match cfg.set {
            SetChoice::Fpf => QpSet::fpf(cfg.n),
            SetChoice::Regular => QpSet::regular(cfg.n),
        };
        set.map_err(|e| CliError::Usage(e.to_string()))
    }
}

struct Ctx {
    cache: KlCache,
    output: Option<Output>,
}

impl Ctx {
    fn kl(&self, n: usize) -> CliResult<Arc<KlTable>> {
        Ok(self.cache.get(n)?)
    }

    fn output(&self, allowed: &[Output]) -> CliResult<Output> {
        let out = self.output.unwrap_or(Output::Json);
        if !allowed.contains(&out) {
            return usage(format!("this command does not support --output {}", output_name(out)));
        }
        Ok(out)
    }
}

fn output_name(o: Output) -> &'static str {
    match o {
        Output::Json => "json",
        Output::Csv => "csv",
        Output::Dot => "dot",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// `Ok(false)` when a consistency check failed.
fn run(cli: Cli) -> CliResult<bool> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return usage("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().map_err(|e| CliError::Failure(e.into()))?;
    }
    let dir = std::env::var_os("QUASICELL_CACHE").filter(|v| !v.is_empty()).map(PathBuf::from).or(cli.cache_dir);
    let ctx = Ctx { cache: KlCache::new(dir), output: cli.output };
    match cli.command {
        Command::Canonical(args) => cmd_canonical(&ctx, &args),
        Command::Graph(args) => cmd_graph(&ctx, &args),
        Command::Afun(args) => cmd_afun(&ctx, &args),
        Command::Insert(args) => cmd_insert(&ctx, &args),
        Command::Verify(args) => cmd_verify(&ctx, &args),
    }
}

fn canonical_data(set: &QpSet, kind: ModuleKind) -> CliResult<CanonicalData> {
    CanonicalData::compute(kind, set).map_err(|e| CliError::Failure(e.into()))
}

fn cmd_canonical(ctx: &Ctx, args: &SetArgs) -> CliResult<bool> {
    let cfg = args.config()?;
    let out = ctx.output(&[Output::Json, Output::Csv])?;
    let set = args.build_set(&cfg)?;
    let kl = if cfg.set == SetChoice::Regular { Some(ctx.kl(cfg.n)?) } else { None };
    let mut ok = true;
    let mut docs = Vec::new();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(export::CANONICAL_HEADER).map_err(anyhow::Error::from)?;
    for &kind in &cfg.kinds {
        let data = canonical_data(&set, kind)?;
        if let Some(kl) = &kl {
            // on the regular set both modules are the Hecke algebra itself
            let d = set.len();
            let agrees = (0..d).all(|y| (0..d).all(|x| data.c[(y, x)] == kl.h(set.element(y), set.element(x))));
            if !agrees {
                eprintln!("{}/{kind}: canonical basis differs from the Kazhdan–Lusztig basis", set.name());
                ok = false;
            }
        }
        match out {
            Output::Csv => export::canonical_csv(&mut w, &set, &data)?,
            _ => docs.push(export::canonical_json(&set, &data)),
        }
    }
    emit(out, docs, w)?;
    Ok(ok)
}

fn emit(out: Output, docs: Vec<Value>, w: csv::Writer<Vec<u8>>) -> CliResult<()> {
    let text = match out {
        Output::Csv => export::finish_csv(w)?,
        _ => export::pretty(&docs)?,
    };
    print!("{text}");
    Ok(())
}

fn cmd_graph(ctx: &Ctx, args: &SetArgs) -> CliResult<bool> {
    let cfg = args.config()?;
    let out = ctx.output(&[Output::Json, Output::Csv, Output::Dot])?;
    let set = args.build_set(&cfg)?;
    let mut docs = Vec::new();
    let mut dot = String::new();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(export::GRAPH_HEADER).map_err(anyhow::Error::from)?;
    for &kind in &cfg.kinds {
        let data = canonical_data(&set, kind)?;
        let g = wgraph::build_graph(&set, &data);
        let cells = wgraph::cells(&g);
        let molecules = wgraph::molecules(&g);
        match out {
            Output::Json => docs.push(export::graph_json(&set, &g, &cells, &molecules)),
            Output::Csv => export::graph_csv(&mut w, &set, &g, &cells)?,
            Output::Dot => export::graph_dot(&mut dot, &set, &g, &cells),
        }
    }
    if out == Output::Dot {
        print!("{dot}");
    } else {
        emit(out, docs, w)?;
    }
    Ok(true)
}

fn cmd_afun(ctx: &Ctx, args: &SetArgs) -> CliResult<bool> {
    let cfg = args.config()?;
    let out = ctx.output(&[Output::Json, Output::Csv])?;
    if cfg.n > quasicell_core::kl::DEFAULT_MAX_RANK {
        return usage(format!("a-function tables are not available at rank {}", cfg.n));
    }
    let set = args.build_set(&cfg)?;
    let kl = ctx.kl(cfg.n)?;
    let mut docs = Vec::new();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(export::AFUN_HEADER).map_err(anyhow::Error::from)?;
    for &kind in &cfg.kinds {
        let data = canonical_data(&set, kind)?;
        let t = StructCoeffTables::compute(&set, &data, &kl).map_err(|e| CliError::Failure(e.into()))?;
        match out {
            Output::Csv => export::afun_csv(&mut w, &set, &t)?,
            _ => docs.push(export::afun_json(&set, &t)),
        }
    }
    emit(out, docs, w)?;
    Ok(true)
}

fn cmd_insert(ctx: &Ctx, args: &InsertArgs) -> CliResult<bool> {
    let out = ctx.output(&[Output::Json, Output::Csv])?;
    let perms: Vec<Perm> = if args.perms.is_empty() {
        let Some(n) = args.n else {
            return usage("give involutions or --n");
        };
        perm::enumerate_fpf(n).map_err(|e| CliError::Usage(e.to_string()))?
    } else {
        let mut v = Vec::new();
        for s in &args.perms {
            let p: Perm = s.parse().map_err(|e: perm::PermError| CliError::Usage(e.to_string()))?;
            if args.n.is_some_and(|n| n != p.rank()) {
                return usage(format!("{p} does not have rank {}", args.n.unwrap_or_default()));
            }
            v.push(p);
        }
        v
    };
    let mut rows = Vec::new();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["element", "row_insertion", "row_stat", "column_insertion", "column_stat", "recording"])
        .map_err(anyhow::Error::from)?;
    for z in perms {
        let row = insertion::p_rbs(&z).map_err(|e| CliError::Usage(format!("{z}: {e}")))?;
        let col = insertion::p_cbs(&z).map_err(|e| CliError::Usage(format!("{z}: {e}")))?;
        let (_, q) = insertion::rsk_full(&z);
        match out {
            Output::Csv => w
                .write_record([
                    z.to_string(),
                    row.to_string(),
                    row.stat_a().to_string(),
                    col.to_string(),
                    col.stat_a().to_string(),
                    q.to_string(),
                ])
                .map_err(anyhow::Error::from)?,
            _ => rows.push(json!({
                "element": z.to_string(),
                "row_insertion": row.rows(),
                "row_shape": row.shape(),
                "row_stat": row.stat_a(),
                "column_insertion": col.rows(),
                "column_shape": col.shape(),
                "column_stat": col.stat_a(),
                "recording": q.rows(),
            })),
        }
    }
    emit(out, rows, w)?;
    Ok(true)
}

fn cmd_verify(ctx: &Ctx, args: &SetArgs) -> CliResult<bool> {
    let cfg = args.config()?;
    if ctx.output == Some(Output::Dot) {
        return usage("verify does not support --output dot");
    }
    let mut source = |n: usize| ctx.cache.get(n).map_err(|e| VerifyError::Kl(format!("{e:#}")));
    let report = verify::run(&cfg, &mut source)?;
    match ctx.output {
        None => {
            print!("{}", report.render());
            for c in 1..=6 {
                if let Some(s) = report.criterion_status(c) {
                    println!("criterion {c}: {s}");
                }
            }
            let fails = report.lines.iter().filter(|l| l.status == Status::Fail).count();
            let warns = report.lines.iter().filter(|l| l.status == Status::Warn).count();
            println!(
                "{}: {} checks, {fails} failed, {warns} warnings",
                if report.passed() { "PASS" } else { "FAIL" },
                report.lines.len()
            );
        }
        Some(Output::Json) => print!("{}", export::pretty(&report)?),
        Some(_) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            export::verify_csv(&mut w, &report)?;
            print!("{}", export::finish_csv(w)?);
        }
    }
    Ok(report.passed())
}
