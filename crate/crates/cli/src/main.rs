use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use smkm_cli::corpus::{fealg_corpus, guarantee_corpus};
use smkm_cli::experiments::{
    chain_records, chain_trials, run_instance, Algorithm, ChainParams, Inner, CHAIN_COLUMNS, CHAIN_CSV_HEADER,
    RUN_COLUMNS, RUN_CSV_HEADER,
};
use smkm_cli::verify;
use smkm_core::chainsim::Case;
use smkm_core::hardgen::{
    gen_chain_family_instance, gen_coordinate, gen_hidden_chain, gen_random_partition, random_layer, CorpusObjective,
};
use smkm_core::io::InstanceFile;
use smkm_core::num::{frac, parse_fraction};
use smkm_core::smkm::DEFAULT_BRANCH_CAP;
use smkm_core::{Rational, Rng};

#[derive(Parser)]
#[command(name = "smkm", version, about = "Streaming submodular maximization under matroid constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Solve instance files and append CSV rows.
    Run(RunArgs),
    /// Run an invariant battery; exits 1 on any failure.
    Verify(VerifyArgs),
    /// Run chain protocol trials.
    Chain(ChainArgs),
}

fn fraction(text: &str) -> std::result::Result<Rational, String> {
    parse_fraction(text).map_err(|e| e.to_string())
}

fn case(text: &str) -> std::result::Result<Case, String> {
    match text {
        "0" => Ok(Case::Zero),
        "1" => Ok(Case::One),
        _ => Err("expected 0 or 1".into()),
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    #[value(name = "hidden_chain")]
    HiddenChain,
    #[value(name = "coordinate")]
    Coordinate,
    #[value(name = "chain_family")]
    ChainFamily,
    #[value(name = "random_partition")]
    RandomPartition,
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    Coverage,
    Cut,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Generator,
    /// Blocks (hidden_chain), coordinates (coordinate) or matroids (random_partition).
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Block size (hidden_chain) or layer size (coordinate).
    #[arg(long, default_value_t = 4)]
    m: usize,
    /// Alphabet size (coordinate) or layer count (chain_family).
    #[arg(long, default_value_t = 3)]
    p: usize,
    /// Ground set size (random_partition).
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Vertices per side of each random layer graph (chain_family).
    #[arg(long, default_value_t = 2)]
    side: u32,
    /// Copies per edge (chain_family).
    #[arg(long, default_value_t = 4)]
    copies: u32,
    #[arg(long, value_parser = fraction, default_value = "1/4")]
    eps: Rational,
    #[arg(long, value_enum, default_value_t = Objective::Coverage)]
    objective: Objective,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    alg: Algorithm,
    #[arg(long, value_parser = fraction, default_value = "1/20")]
    eps: Rational,
    #[arg(long, required = true, num_args = 1..)]
    instance: Vec<PathBuf>,
    /// Append to this CSV file; stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Leave wall times and the generation time out of the CSV.
    #[arg(long)]
    no_timestamp: bool,
    #[arg(long, default_value_t = DEFAULT_BRANCH_CAP)]
    branch_cap: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    MatroidAxioms,
    Fealg,
    Family,
    SmkmGuarantee,
    HardgenSuccess,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corpus size for the fealg and smkm-guarantee suites.
    #[arg(long, default_value_t = 200)]
    count: usize,
}

#[derive(Args)]
struct ChainArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    protocol: u8,
    /// Players (protocol 1) or coordinates (protocol 2).
    #[arg(long)]
    k: Option<usize>,
    /// String length (protocols 1, 2) or copies per edge (protocol 3).
    #[arg(long)]
    m: Option<usize>,
    /// Players (protocol 2) or layers (protocol 3).
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value_t = 1)]
    copies: usize,
    /// Matching size of every layer (protocol 3).
    #[arg(long, default_value_t = 2)]
    side: u32,
    #[arg(long, value_parser = fraction, default_value = "1/4")]
    eps: Rational,
    #[arg(long, value_parser = fraction, default_value = "3")]
    alpha: Rational,
    /// Force every trial into one case.
    #[arg(long, value_parser = case)]
    case: Option<Case>,
    #[arg(long, value_enum, default_value_t = Inner::Exact)]
    inner: Inner,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write to this CSV file; stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    no_timestamp: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(a).map(|_| true),
        Command::Run(a) => cmd_run(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Chain(a) => cmd_chain(a).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let mut rng = Rng::new(a.seed);
    let file = match a.family {
        Generator::HiddenChain => InstanceFile::from_hidden_chain(&gen_hidden_chain(a.k, a.m, &mut rng)?, a.seed),
        Generator::Coordinate => InstanceFile::from_coordinate(&gen_coordinate(a.p, a.m, a.k, &mut rng)?, a.seed),
        Generator::ChainFamily => {
            let layers = (0..a.p).map(|_| random_layer(a.side, &mut rng)).collect();
            let o = (0..a.p).map(|_| 1 + rng.below(a.copies.max(1) as u64) as u32).collect();
            let inst = gen_chain_family_instance(a.p, layers, a.copies, a.eps.clone(), o, &mut rng)?;
            InstanceFile::from_chain_family(&inst, a.seed)
        }
        Generator::RandomPartition => {
            let kind = match a.objective {
                Objective::Coverage => CorpusObjective::Coverage,
                Objective::Cut => CorpusObjective::Cut,
            };
            InstanceFile::from_random(&gen_random_partition(a.n, a.k, kind, &mut rng)?, a.seed)
        }
    };
    match a.out {
        Some(path) => file.save(&path)?,
        None => io::stdout().write_all(file.to_json().as_bytes())?,
    }
    Ok(())
}

fn unix_seconds() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Writes the version comment, an optional generation time and the column row.
fn write_preamble(out: &mut dyn Write, version: &str, columns: &[&str], timed: bool) -> Result<()> {
    writeln!(out, "{version}")?;
    if timed {
        writeln!(out, "# generated-at {}", unix_seconds())?;
    }
    let mut w = csv::Writer::from_writer(&mut *out);
    w.write_record(columns)?;
    w.flush()?;
    Ok(())
}

fn write_rows(out: &mut dyn Write, rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn emit(
    path: Option<&Path>,
    append: bool,
    version: &str,
    columns: &[&str],
    timed: bool,
    rows: &[Vec<String>],
) -> Result<()> {
    match path {
        None => {
            let mut out = io::stdout().lock();
            write_preamble(&mut out, version, columns, timed)?;
            write_rows(&mut out, rows)
        }
        Some(path) => {
            let fresh = !append || fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
            let mut file = OpenOptions::new()
                .create(true)
                .append(!fresh)
                .write(true)
                .truncate(fresh)
                .open(path)
                .with_context(|| format!("opening {}", path.display()))?;
            if fresh {
                write_preamble(&mut file, version, columns, timed)?;
            }
            write_rows(&mut file, rows)
        }
    }
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let mut rows = Vec::with_capacity(a.instance.len());
    for path in &a.instance {
        let file = InstanceFile::load(path)?;
        let row =
            run_instance(&file, a.alg, &a.eps, a.branch_cap).with_context(|| format!("solving {}", path.display()))?;
        rows.push(row.record(!a.no_timestamp));
    }
    emit(a.csv.as_deref(), true, RUN_CSV_HEADER, &RUN_COLUMNS, !a.no_timestamp, &rows)
}

fn cmd_verify(a: VerifyArgs) -> Result<bool> {
    let report = match a.suite {
        Suite::MatroidAxioms => verify::matroid_axioms(a.seed)?,
        Suite::Fealg => verify::fealg(&fealg_corpus(a.count, a.seed)?)?,
        Suite::Family => verify::family(a.seed, 10_000)?,
        Suite::SmkmGuarantee => verify::smkm_guarantee(&guarantee_corpus(a.count, a.seed)?, &frac(1, 20))?,
        Suite::HardgenSuccess => verify::hardgen_success(3, 10, 40, 500, a.seed, 0.99)?,
    };
    print!("{report}");
    println!("{} checks, {} failed", report.checks.len(), report.failures());
    Ok(report.passed())
}

fn cmd_chain(a: ChainArgs) -> Result<()> {
    let (k, m, p) = match a.protocol {
        1 => (a.k.unwrap_or(4), a.m.unwrap_or(16), 0),
        2 => (a.k.unwrap_or(12), a.m.unwrap_or(4), a.p.unwrap_or(3)),
        _ => (0, a.m.unwrap_or(4), a.p.unwrap_or(2)),
    };
    let params = ChainParams {
        protocol: a.protocol,
        k,
        m,
        p,
        copies: a.copies,
        side: a.side,
        eps: a.eps,
        alpha: a.alpha,
        case: a.case,
        inner: a.inner,
        trials: a.trials,
        seed: a.seed,
    };
    let summary = chain_trials(&params)?;
    let rows = chain_records(&params, &summary);
    emit(a.csv.as_deref(), false, CHAIN_CSV_HEADER, &CHAIN_COLUMNS, !a.no_timestamp, &rows)?;
    if a.csv.is_some() {
        println!(
            "protocol {}: {}/{} correct, max message {} bits",
            a.protocol,
            summary.correct,
            summary.rows.len(),
            summary.max_bits
        );
    }
    Ok(())
}
