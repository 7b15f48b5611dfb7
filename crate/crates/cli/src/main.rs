use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tisim_cli::{
    cmd_analyze, cmd_graph, cmd_run, render_run, resolve, write_outputs, CliError, CliResult, Overrides, RunManifest,
    Setup, DEFAULT_K_SIGMA, DEFAULT_TRIALS,
};
use tisim_core::scenarios::{EveBasis, MeasurementOrdering};
use tisim_core::ScenarioKind;

/// Transactional-interpretation scenario simulator.
#[derive(Debug, Parser)]
#[command(name = "tisim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a scenario and gate it against its analytic distribution.
    Run(RunArgs),
    /// Print exact probabilities and conditional-state entanglement.
    Analyze(ScenarioArgs),
    /// Write the swap wave graph as DOT and report D1/D4 connectivity.
    Graph(GraphArgs),
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// renninger, maudlin, quantum_liar or swap.
    #[arg(value_name = "SCENARIO")]
    positional: Option<ScenarioKind>,
    #[arg(long)]
    scenario: Option<ScenarioKind>,
    /// TOML file with per-scenario sections.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_name = "bell|product")]
    eve_basis: Option<EveBasis>,
    #[arg(long, value_name = "eve-first|edges-first")]
    ordering: Option<MeasurementOrdering>,
    /// Maudlin: place absorber C at the far left.
    #[arg(long)]
    far_left_absorber: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON report path; the CSV table is written with a .csv extension.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_K_SIGMA)]
    k_sigma: f64,
    /// Worker threads; 1 runs sequentially. Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct GraphArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// DOT output path; printed to stdout when absent.
    #[arg(long)]
    graph_out: Option<PathBuf>,
}

impl ScenarioArgs {
    fn setup(&self) -> CliResult<Setup> {
        let kind = match (self.positional, self.scenario) {
            (Some(a), Some(b)) if a != b => {
                return Err(CliError::Config(format!("scenario given twice: `{a}` and `{b}`")));
            }
            (a, b) => a.or(b),
        };
        let overrides = Overrides {
            eve_basis: self.eve_basis,
            ordering: self.ordering,
            far_left_absorber: self.far_left_absorber,
        };
        resolve(kind, self.config.as_deref(), &overrides)
    }
}

fn run(args: RunArgs) -> CliResult<bool> {
    let setup = args.scenario.setup()?;
    let manifest = RunManifest {
        scenario: setup.scenario,
        trials: args.trials,
        seed: args.seed,
        k_sigma: args.k_sigma,
        threads: args.threads,
    };
    let output = cmd_run(&manifest)?;
    print!("{}", render_run(&output));
    if let Some(out) = &args.out {
        let (json, csv) = write_outputs(out, &output)?;
        println!("wrote {} and {}", json.display(), csv.display());
    }
    Ok(output.report.pass)
}

fn graph(args: GraphArgs) -> CliResult<()> {
    let setup = args.scenario.setup()?;
    let output = cmd_graph(&setup.scenario)?;
    match &args.graph_out {
        Some(path) => {
            std::fs::write(path, &output.dot).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            println!("wrote {}", path.display());
        }
        None => print!("{}", output.dot),
    }
    println!("{}", output.connectivity_line());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Analyze(args) => args.setup().and_then(|s| cmd_analyze(&s)).map(|a| {
            print!("{}", a.render());
            true
        }),
        Command::Graph(args) => graph(args).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("gate failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
