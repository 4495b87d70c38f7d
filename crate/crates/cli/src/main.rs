use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use treegrow::oracle::{enumerate_plane_trees, enumerate_subtrees};
use treegrow::rational::format_rational;
use treegrow::sgtrees::WeightSequence;
use treegrow::treespace::{format_words, to_dot, PlaneTree, RootedSubtree};
use treegrow_cli::config::{parse_theta, FileConfig, Model, RunConfig, Suite, WeightSpec};
use treegrow_cli::exit;
use treegrow_cli::suites::{run_suite, StatThresholds, SuiteParams};
use treegrow_cli::trace::{load_trace, write_trace};

#[derive(Parser)]
#[command(name = "treegrow", version, about = "Grow nested random trees and verify their laws exactly")]
struct Cli {
    /// TOML file whose keys mirror the long flags; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow one nested chain and write its JSON-lines trace.
    Grow(GrowArgs),
    /// Run a verification suite and print a JSON report.
    Verify(VerifyArgs),
    /// List every tree of a given size.
    Enumerate(EnumerateArgs),
    /// Re-validate a trace file.
    CheckTrace(CheckTraceArgs),
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: Option<Model>,
    /// Offspring weights `w_0,w_1,…` as rationals, or `ones`.
    #[arg(long)]
    w: Option<String>,
    /// Letter weights `θ_1,θ_2,…` for the subtree model.
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct GrowArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of vertices to grow to.
    #[arg(long)]
    n: Option<usize>,
    /// Trace file (default `trace.jsonl`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the final tree in DOT format.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Do not print the per-step vertices.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Samples per seed (stats) or random instances (bijection).
    #[arg(long)]
    samples: Option<u64>,
    /// Seeds in the statistical battery.
    #[arg(long)]
    seeds: Option<u64>,
    /// Chains in the stepwise shape battery.
    #[arg(long)]
    chains: Option<u64>,
    /// Size the shape battery grows to.
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long, default_value_t = StatThresholds::default().p_min)]
    p_min: f64,
    #[arg(long, default_value_t = StatThresholds::default().seed_fraction)]
    seed_fraction: f64,
    #[arg(long, default_value_t = StatThresholds::default().tv_max)]
    tv_max: f64,
    /// Also write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Plane trees with this many vertices.
    #[arg(long, group = "kind")]
    plane_trees: Option<usize>,
    /// Rooted subtrees of the Ulam–Harris tree with this many vertices.
    #[arg(long, group = "kind")]
    subtrees: Option<usize>,
    /// Plane trees with out-degrees in `dℕ` and this many vertices.
    #[arg(long, group = "kind")]
    arith_trees: Option<usize>,
    /// Largest letter for `--subtrees`.
    #[arg(long, default_value_t = 2)]
    dmax: u32,
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// Print each tree in DOT format too.
    #[arg(long)]
    dot: bool,
}

#[derive(Args)]
struct CheckTraceArgs {
    path: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::PASS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if let Some(treegrow::Error::Refused { witness, reason }) = e.downcast_ref::<treegrow::Error>() {
                eprintln!("refused: {reason}; log-concavity fails at index {witness}");
                return ExitCode::from(exit::REFUSED);
            }
            eprintln!("error: {e:#}");
            ExitCode::from(exit::CONFIG)
        }
    }
}

/// Prints a line, ignoring a closed pipe.
fn say(line: &str) {
    let _ = writeln!(std::io::stdout(), "{line}");
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Grow(args) => grow(args, &file),
        Command::Verify(args) => verify(args, &file),
        Command::Enumerate(args) => enumerate(args),
        Command::CheckTrace(args) => check_trace(args),
    }
}

fn weight_spec(flag: &Option<String>, file: &FileConfig) -> anyhow::Result<Option<WeightSpec>> {
    match flag.clone().or(file.weights()?) {
        Some(text) => WeightSpec::parse(&text).map(Some),
        None => Ok(None),
    }
}

fn theta(flag: &Option<String>, file: &FileConfig) -> anyhow::Result<Option<treegrow::subtree_model::Theta>> {
    flag.clone().or(file.theta()?).map(|t| parse_theta(&t)).transpose()
}

fn grow(args: GrowArgs, file: &FileConfig) -> anyhow::Result<u8> {
    let model = args.model.model.or(file.model).unwrap_or(Model::Sg);
    let default_d = if model == Model::SgArith { 2 } else { 1 };
    let cfg = RunConfig {
        model,
        weights: weight_spec(&args.model.w, file)?,
        theta: theta(&args.model.theta, file)?,
        d: args.model.d.or(file.d).unwrap_or(default_d),
        n: args.n.or(file.n).context("missing --n")?,
        seed: args.model.seed.or(file.seed).unwrap_or(0),
        out: args.out.or(file.out.clone()).unwrap_or_else(|| PathBuf::from("trace.jsonl")),
        dot: args.dot.or(file.dot.clone()),
    };
    cfg.validate()?;
    if let (Some(spec), Model::Sg | Model::SgArith) = (&cfg.weights, cfg.model) {
        // Refuse before creating any output.
        refuse_unless_log_concave(&spec.resolve(cfg.n)?, cfg.d)?;
    }

    let file_out = File::create(&cfg.out).with_context(|| format!("cannot create {}", cfg.out.display()))?;
    let mut sink = BufWriter::new(file_out);
    let stdout = std::io::stdout();
    let mut console = stdout.lock();
    let quiet = args.quiet;
    let last = write_trace(&cfg, &mut sink, |step| {
        if !quiet {
            let words: Vec<String> = step.new_vertices.iter().map(|w| w.to_string()).collect();
            let _ = writeln!(console, "{}\t{}\t{}", step.step, step.n, words.join(" "));
        }
    })?;
    sink.flush()?;
    if let Some(path) = &cfg.dot {
        let dot = match cfg.model {
            Model::Subtree => to_dot(&RootedSubtree::new(last.clone())?, "subtree"),
            _ => to_dot(&PlaneTree::new(last.clone())?, "tree"),
        };
        std::fs::write(path, dot).with_context(|| format!("cannot write {}", path.display()))?;
    }
    writeln!(
        console,
        "grew {} vertices ({} model, seed {}); trace in {}",
        last.len(),
        cfg.model,
        cfg.seed,
        cfg.out.display()
    )?;
    Ok(exit::PASS)
}

/// Explains a refusal with the offending entries before bailing out.
fn refuse_unless_log_concave(w: &WeightSequence, d: u32) -> anyhow::Result<()> {
    if let Err(e @ treegrow::Error::Refused { witness, .. }) = w.require_log_concave(d) {
        let big_w = w.progression(d);
        eprintln!(
            "W = ({}): W_{witness}^2 = {} < W_{}·W_{} = {}",
            big_w.iter().map(format_rational).collect::<Vec<_>>().join(", "),
            format_rational(&(&big_w[witness] * &big_w[witness])),
            witness - 1,
            witness + 1,
            format_rational(&(&big_w[witness - 1] * &big_w[witness + 1])),
        );
        return Err(e.into());
    }
    Ok(())
}

fn verify(args: VerifyArgs, file: &FileConfig) -> anyhow::Result<u8> {
    let Some(suite) = args.suite.or(file.suite) else {
        bail!("missing --suite");
    };
    let params = SuiteParams {
        model: args.model.model.or(file.model).unwrap_or(Model::Sg),
        weights: weight_spec(&args.model.w, file)?,
        theta: theta(&args.model.theta, file)?,
        d: args.model.d.or(file.d),
        n_min: args.n_min.or(file.n_min),
        n_max: args.n_max.or(file.n_max),
        seed: args.model.seed.or(file.seed).unwrap_or(0),
        samples: args.samples.or(file.samples),
        seeds: args.seeds.or(file.seeds),
        chains: args.chains.or(file.chains),
        horizon: args.horizon.or(file.horizon),
        thresholds: StatThresholds {
            p_min: args.p_min,
            seed_fraction: args.seed_fraction,
            tv_max: args.tv_max,
        },
    };
    let report = run_suite(suite, &params)?;
    let text = serde_json::to_string_pretty(&report)?;
    say(&text);
    if let Some(path) = args.report.or(file.report.clone()) {
        std::fs::write(&path, format!("{text}\n")).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(if report.passed { exit::PASS } else { exit::FAILED })
}

fn enumerate(args: EnumerateArgs) -> anyhow::Result<u8> {
    let listing: Vec<(String, String)> = if let Some(n) = args.plane_trees {
        enumerate_plane_trees(n, 1)?.iter().map(|t| (format_words(t), to_dot(t, "tree"))).collect()
    } else if let Some(n) = args.arith_trees {
        enumerate_plane_trees(n, args.d)?.iter().map(|t| (format_words(t), to_dot(t, "tree"))).collect()
    } else if let Some(n) = args.subtrees {
        enumerate_subtrees(n, args.dmax)?
            .iter()
            .map(|t| (format_words(t), to_dot(t, "subtree")))
            .collect()
    } else {
        bail!("choose one of --plane-trees, --subtrees, --arith-trees");
    };
    for (words, dot) in &listing {
        say(words);
        if args.dot {
            say(dot);
        }
    }
    say(&format!("count: {}", listing.len()));
    Ok(exit::PASS)
}

fn check_trace(args: CheckTraceArgs) -> anyhow::Result<u8> {
    let file = File::open(&args.path).with_context(|| format!("cannot open {}", args.path.display()))?;
    match load_trace(BufReader::new(file)) {
        Ok(summary) => {
            say(&serde_json::to_string(&summary)?);
            Ok(exit::PASS)
        }
        Err(e) => {
            eprintln!("invalid trace: {e:#}");
            Ok(exit::FAILED)
        }
    }
}
