use std::fs;
use std::io::{self, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use homeomatch::bench::{self, ExperimentSpec};
use homeomatch::generate::{complete_graph, plant_subdivision, random_labeled_graph};
use homeomatch::oracle::{self, Verdict};
use homeomatch::paths::DEFAULT_MAX_H;
use homeomatch::search::{determine, enumerate_with, NodeOrder, SearchConfig, Strategy};
use homeomatch::stats::SearchStats;
use homeomatch::{parse_graph, parse_mapping, LabeledGraph};

const MAX_H_VAR: &str = "HOMEOMATCH_MAX_H";

#[derive(Parser)]
#[command(
    name = "homeomatch",
    version,
    about = "Labeled topological minor search with bounded path lengths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the pattern is an (l,h)-topological minor of the data graph.
    Determine(DetermineArgs),
    /// Print every mapping, separated by blank lines.
    Enumerate(EnumerateArgs),
    /// Write a generated graph.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run an experiment spec and write CSV rows plus a summary block.
    Bench(BenchArgs),
    /// Check a mapping file. Exit 0 if valid, 1 otherwise.
    Verify(VerifyArgs),
    /// Solve by exhaustive search.
    Solve(SolveArgs),
}

#[derive(Args)]
struct Instance {
    pattern: PathBuf,
    data: PathBuf,
    #[arg(long)]
    l: usize,
    #[arg(long)]
    h: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Ndshd1,
    Ndshd2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Mcf,
    Ascending,
}

#[derive(Args)]
struct SearchFlags {
    #[arg(long, value_enum, default_value = "ndshd2")]
    algo: Algo,
    #[arg(long, value_enum, default_value = "mcf")]
    order: Order,
    /// Accepted for symmetry with `gen`; the search itself is deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Give up after this many seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Write search statistics as JSON.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Record the per-call depth trace (in the stats file, or on stderr).
    #[arg(long)]
    trace: bool,
}

impl SearchFlags {
    fn config(&self) -> Result<SearchConfig> {
        Ok(SearchConfig {
            strategy: match self.algo {
                Algo::Ndshd1 => Strategy::Ndshd1,
                Algo::Ndshd2 => Strategy::Ndshd2,
            },
            order: match self.order {
                Order::Mcf => NodeOrder::MostConstrained,
                Order::Ascending => NodeOrder::Ascending,
            },
            max_h: max_h()?,
            trace: self.trace,
            time_limit: self.timeout.map(Duration::from_secs_f64),
            ..Default::default()
        })
    }

    fn emit_stats(&self, stats: &SearchStats) -> Result<()> {
        if let Some(path) = &self.stats {
            let json = serde_json::to_string_pretty(stats)?;
            fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
        } else if let Some(trace) = &stats.trace {
            let mut err = io::stderr().lock();
            for t in trace {
                writeln!(err, "{},{},{}", t.call, t.depth, t.phase)?;
            }
        }
        Ok(())
    }
}

#[derive(Args)]
struct DetermineArgs {
    #[command(flatten)]
    instance: Instance,
    #[command(flatten)]
    search: SearchFlags,
    /// Print the mapping found.
    #[arg(long)]
    witness: bool,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    instance: Instance,
    #[command(flatten)]
    search: SearchFlags,
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Subcommand)]
enum GenKind {
    /// Connected random graph with edge probability avg_degree / (n - 1).
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4.0)]
        avg_degree: f64,
        #[arg(long, default_value_t = 20)]
        labels: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Data graph containing a subdivision of a pattern.
    Planted {
        /// Pattern file; defaults to the complete graph on `--complete` vertices.
        #[arg(long, conflicts_with = "complete")]
        pattern: Option<PathBuf>,
        #[arg(long)]
        complete: Option<usize>,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        h: usize,
        #[arg(long, default_value_t = 0)]
        padding: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Also write the pattern used.
        #[arg(long)]
        pattern_out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BenchArgs {
    spec: PathBuf,
    /// CSV destination; stdout if omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Summary destination; stderr if omitted.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Drop wall-clock columns so the output is reproducible byte for byte.
    #[arg(long)]
    omit_timing: bool,
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    instance: Instance,
    mapping: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: Instance,
    /// Use the brute-force enumerator (required; it is the only solver here).
    #[arg(long, required = true)]
    oracle: bool,
    /// Print every solution instead of the first.
    #[arg(long)]
    all: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Determine(args) => cmd_determine(args),
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::Gen { kind } => cmd_gen(kind).map(|_| ExitCode::SUCCESS),
        Command::Bench(args) => cmd_bench(args).map(|_| ExitCode::SUCCESS),
        Command::Verify(args) => cmd_verify(args),
        Command::Solve(args) => cmd_solve(args),
    }
}

fn max_h() -> Result<usize> {
    match std::env::var(MAX_H_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{MAX_H_VAR}={v} is not a number")),
        Err(_) => Ok(DEFAULT_MAX_H),
    }
}

fn read_graph(path: &Path) -> Result<LabeledGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load(instance: &Instance) -> Result<(LabeledGraph, LabeledGraph)> {
    Ok((read_graph(&instance.pattern)?, read_graph(&instance.data)?))
}

fn bool_exit(b: bool) -> ExitCode {
    if b {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn cmd_determine(args: DetermineArgs) -> Result<ExitCode> {
    let (g1, g2) = load(&args.instance)?;
    let config = args.search.config()?;
    let outcome = determine(&g1, &g2, args.instance.l, args.instance.h, &config)?;
    args.search.emit_stats(&outcome.stats)?;
    if outcome.timed_out() {
        bail!("timed out after {:.3} s", outcome.stats.wall_time);
    }
    let mut out = io::stdout().lock();
    writeln!(out, "{}", outcome.found())?;
    if let (true, Some(m)) = (args.witness, &outcome.mapping) {
        write!(out, "{}", m.to_text(&g1))?;
    }
    Ok(bool_exit(outcome.found()))
}

fn cmd_enumerate(args: EnumerateArgs) -> Result<ExitCode> {
    let (g1, g2) = load(&args.instance)?;
    let config = args.search.config()?;
    let mut out = io::BufWriter::new(io::stdout().lock());
    let mut count = 0usize;
    let mut failure = None;
    let stats = enumerate_with(&g1, &g2, args.instance.l, args.instance.h, &config, args.limit, |m| {
        let sep = if count > 0 { "\n" } else { "" };
        count += 1;
        match write!(out, "{sep}{}", m.to_text(&g1)) {
            Ok(()) => ControlFlow::Continue(()),
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    out.flush()?;
    args.search.emit_stats(&stats)?;
    if stats.outcome == homeomatch::stats::Outcome::Timeout {
        bail!("timed out after {count} mappings");
    }
    eprintln!("{count} mapping(s)");
    Ok(bool_exit(count > 0))
}

fn cmd_gen(kind: GenKind) -> Result<()> {
    match kind {
        GenKind::Random {
            n,
            avg_degree,
            labels,
            seed,
            out,
        } => {
            let g = random_labeled_graph(n, avg_degree, labels, seed)?;
            write_out(out.as_deref(), &g.to_text())
        }
        GenKind::Planted {
            pattern,
            complete,
            l,
            h,
            padding,
            seed,
            out,
            pattern_out,
        } => {
            let p = match (pattern, complete) {
                (Some(path), _) => read_graph(&path)?,
                (None, Some(k)) if k > 0 => complete_graph(k),
                _ => bail!("planted needs --pattern <file> or --complete <k> with k >= 1"),
            };
            let g = plant_subdivision(&p, l, h, padding, seed)?;
            if let Some(path) = pattern_out {
                write_out(Some(&path), &p.to_text())?;
            }
            write_out(out.as_deref(), &g.to_text())
        }
    }
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let text = fs::read_to_string(&args.spec).with_context(|| format!("reading {}", args.spec.display()))?;
    let spec = ExperimentSpec::parse(&text).with_context(|| format!("in {}", args.spec.display()))?;
    let base = args.spec.parent().unwrap_or(Path::new("."));
    let quiet = args.quiet;
    let records = bench::run_experiment(&spec, base, |r| {
        if !quiet {
            eprintln!(
                "{} point {} rep {} {}: {} in {:.3} s",
                spec.name,
                r.point,
                r.repetition,
                r.strategy.name(),
                r.stats.outcome,
                r.stats.wall_time
            );
        }
    })?;

    let mut csv = Vec::new();
    bench::write_csv(&spec, &records, &mut csv, args.omit_timing)?;
    write_out(args.out.as_deref(), std::str::from_utf8(&csv)?)?;

    let mut summary = Vec::new();
    bench::write_summary(&bench::summarize(&records), &mut summary, args.omit_timing)?;
    match &args.summary {
        Some(p) => fs::write(p, summary).with_context(|| format!("writing {}", p.display()))?,
        None => io::stderr().lock().write_all(&summary)?,
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let (g1, g2) = load(&args.instance)?;
    let text = fs::read_to_string(&args.mapping).with_context(|| format!("reading {}", args.mapping.display()))?;
    let mapping = parse_mapping(&text, &g1).with_context(|| format!("parsing {}", args.mapping.display()))?;
    match oracle::verify_mapping(&g1, &g2, args.instance.l, args.instance.h, &mapping)? {
        Verdict::Valid => {
            println!("valid");
            Ok(ExitCode::SUCCESS)
        }
        Verdict::Invalid(v) => {
            println!("invalid: {v}");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    debug_assert!(args.oracle);
    let (g1, g2) = load(&args.instance)?;
    let (l, h) = (args.instance.l, args.instance.h);
    let solutions = oracle::brute_force_solve(&g1, &g2, l, h)?;
    let mut out = io::stdout().lock();
    writeln!(out, "{}", !solutions.is_empty())?;
    let shown = if args.all {
        solutions.len()
    } else {
        solutions.len().min(1)
    };
    for (i, m) in solutions[..shown].iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        write!(out, "{}", m.to_text(&g1))?;
    }
    Ok(bool_exit(!solutions.is_empty()))
}
