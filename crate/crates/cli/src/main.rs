mod commands;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "ehsmc",
    version,
    about = "Model checker for epistemic interval logic over interpreted systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a formula holds at an interval.
    Check(CheckArgs),
    /// Same as `check --engine oracle`.
    Oracle(CheckArgs),
    /// Translate between variable labellings and regular atoms.
    Reduce(ReduceArgs),
    /// Classify each variable's labelling and the formula's fragment.
    Classify(InfoArgs),
    /// Sizes, automata and interval-type bounds.
    Stats(InfoArgs),
    /// Graphviz output for the transition graph, an automaton or a tree.
    ExportDot(DotArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Logic {
    Plus,
    Re,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Auto,
    Bde,
    Abln,
    Oracle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundModeArg {
    Paper,
    Tight,
    User,
}

#[derive(Args)]
struct FormulaArgs {
    /// Formula text.
    #[arg(required_unless_present = "formula_file")]
    formula: Option<String>,
    /// Read the formula from a file instead.
    #[arg(long, conflicts_with = "formula")]
    formula_file: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value = "plus")]
    logic: Logic,
}

#[derive(Args)]
struct CheckArgs {
    /// System description file.
    system: std::path::PathBuf,
    #[command(flatten)]
    formula: FormulaArgs,
    /// Configuration aliases, comma or space separated; default is the initial point.
    #[arg(long)]
    interval: Option<String>,
    /// Check `[A] formula` at the initial point instead.
    #[arg(long, conflicts_with = "interval")]
    all_initial: bool,
    #[arg(long, value_enum, default_value = "auto")]
    engine: Engine,
    #[arg(long, value_enum, default_value = "paper")]
    bound_mode: BoundModeArg,
    /// Length bound for `--bound-mode user` and for the oracle.
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long)]
    frontier_ceiling: Option<u128>,
    /// Print an explanation (BDE engine only).
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    /// Variables to regular atoms over a point-based labelling.
    ToRe,
    /// Regular atoms back to variables.
    ToPlus,
}

#[derive(Args)]
struct ReduceArgs {
    system: std::path::PathBuf,
    #[arg(required_unless_present = "formula_file")]
    formula: Option<String>,
    #[arg(long, conflicts_with = "formula")]
    formula_file: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    direction: Direction,
    #[arg(long)]
    out_system: Option<std::path::PathBuf>,
    #[arg(long)]
    out_formula: Option<std::path::PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct InfoArgs {
    system: std::path::PathBuf,
    formula: Option<String>,
    #[arg(long)]
    formula_file: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value = "plus")]
    logic: Logic,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DotArgs {
    system: std::path::PathBuf,
    /// `tg`, `automaton:VAR` or `mct:FORMULA:HORIZON`.
    target: String,
    /// Root interval for `mct` targets.
    #[arg(long)]
    interval: Option<String>,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(a) => commands::check(a, false),
        Command::Oracle(a) => commands::check(a, true),
        Command::Reduce(a) => commands::reduce(a),
        Command::Classify(a) => commands::classify(a),
        Command::Stats(a) => commands::stats(a),
        Command::ExportDot(a) => commands::export_dot(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.error);
            if let Some(hint) = e.hint {
                eprintln!("hint: {hint}");
            }
            ExitCode::from(e.code)
        }
    }
}
