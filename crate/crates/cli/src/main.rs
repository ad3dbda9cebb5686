use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use onticlab::{install_tolerances, Tolerances};

mod commands;

/// Ontological-model toolkit: state constructions, anti-distinguishing
/// measurements, model audits, overlap bounds and overlap LPs.
///
/// Exit status: 0 on success or a positive verdict, 1 on a negative verdict
/// (failed audit, ontic classification, infeasible LP, criterion not met),
/// 2 on usage, input or numerical errors. Tolerances can be overridden with a
/// JSON object of name/value pairs in the file named by
/// ONTICLAB_TOLERANCE_FILE.
#[derive(Parser)]
#[command(name = "onticlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a state family and report its overlaps and criterion verdicts.
    Construct(ConstructArgs),
    /// Evaluate the anti-distinguishability criterion for a triple.
    CheckAntidist(TripleArgs),
    /// Synthesize an anti-distinguishing POVM for a triple.
    SynthPovm(SynthArgs),
    /// Audit a model against a scenario and classify its superpositions.
    Audit(AuditArgs),
    /// Classify a state of a model as an epistemic or ontic superposition.
    Classify(ClassifyArgs),
    /// Tabulate the closed-form bounds over a grid of alpha^2 values.
    BoundsTable(BoundsArgs),
    /// Maximise an overlap by linear programming over vertex models.
    LpMaxOverlap(LpArgs),
    /// Emit the bundled four-state toy-bit model.
    ToyBit(OutArg),
}

#[derive(Args)]
struct OutArg {
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    theorem: u8,
    #[arg(long, conflicts_with = "alpha_sq", required_unless_present = "alpha_sq")]
    alpha: Option<f64>,
    #[arg(long)]
    alpha_sq: Option<f64>,
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[command(flatten)]
    out: OutArg,
}

/// Where a triple of states comes from.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct TripleSource {
    /// JSON array of three states, each `{dim, amplitudes: [[re, im], ...]}`.
    #[arg(long)]
    states: Option<PathBuf>,
    /// The triple `[psi, phi, |0>]` of the first family.
    #[arg(long, num_args = 2, value_names = ["ALPHA", "D"])]
    thm1: Option<Vec<f64>>,
    /// Squared pairwise overlaps `a b c` (criterion only).
    #[arg(long, num_args = 3, value_names = ["A", "B", "C"])]
    overlaps: Option<Vec<f64>>,
}

#[derive(Args)]
struct TripleArgs {
    #[command(flatten)]
    source: TripleSource,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    source: TripleSource,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    model: PathBuf,
    /// Defaults to the scenario embedded in the model file.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Overrides the scenario's epsilon.
    #[arg(long)]
    epsilon: Option<f64>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    psi: String,
    /// Basis state labels, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    basis: Vec<String>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Comma-separated alpha^2 values; defaults to k/400 for k = 1..99.
    #[arg(long, value_delimiter = ',')]
    alpha_sq: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ScenarioSource {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// First-family scenario for `ALPHA D`.
    #[arg(long, num_args = 2, value_names = ["ALPHA", "D"])]
    thm1: Option<Vec<f64>>,
    /// Second-family scenario for `ALPHA D`.
    #[arg(long, num_args = 2, value_names = ["ALPHA", "D"])]
    thm2: Option<Vec<f64>>,
}

#[derive(Args)]
struct LpArgs {
    #[command(flatten)]
    source: ScenarioSource,
    /// The pair `S1 S2`; the asymmetric mode bounds the overlap of S2 with a preparation of S1.
    #[arg(long, num_args = 2, value_names = ["S1", "S2"], default_values = ["psi", "ket0"])]
    pair: Vec<String>,
    /// Overrides the scenario's epsilon (generated scenarios default to 0).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    asymmetric: bool,
    /// Require S1 to be an epistemic superposition of the scenario basis (implies --asymmetric).
    #[arg(long)]
    epistemic_constraint: bool,
    /// Write the symmetric optimum's witness model here.
    #[arg(long)]
    witness_out: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

fn load_tolerances() -> anyhow::Result<()> {
    let Ok(path) = std::env::var("ONTICLAB_TOLERANCE_FILE") else {
        return Ok(());
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {path}"))?;
    let overrides: BTreeMap<String, f64> =
        serde_json::from_str(&text).with_context(|| format!("parsing tolerance file {path}"))?;
    install_tolerances(Tolerances::default().with_overrides(&overrides)?)?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    load_tolerances()?;
    match cli.command {
        Command::Construct(a) => commands::construct(a),
        Command::CheckAntidist(a) => commands::check_antidist(a),
        Command::SynthPovm(a) => commands::synth_povm(a),
        Command::Audit(a) => commands::audit(a),
        Command::Classify(a) => commands::classify(a),
        Command::BoundsTable(a) => commands::bounds_table(a),
        Command::LpMaxOverlap(a) => commands::lp_max_overlap(a),
        Command::ToyBit(a) => commands::toy_bit(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("onticlab: {msg}");
            ExitCode::from(2)
        }
    }
}
