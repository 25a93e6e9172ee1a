//! `hotspot-lab` — classify singular potentials, evolve mode-decomposed
//! heat flows, and check hot-spot predictions against the runs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hotspot_cli::pipeline::{self, Overrides};
use hotspot_cli::suite::{Suite, SuiteConfig};

#[derive(Parser)]
#[command(
    name = "hotspot-lab",
    about = "Hot-spot dynamics for heat flows with inverse-square-type potentials",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check condition (V), classify the operator, and report functionals.
    Classify(RunArgs),
    /// Evolve a scenario, track the hot spot, and fit rate laws.
    Run(RunArgs),
    /// Solve and export the harmonic profiles only.
    Profile(RunArgs),
    /// Run the numbered acceptance checks over the bundled scenarios.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (defaults to the scenario's `outputs.directory`,
    /// falling back to `out/<name>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the radial cell count.
    #[arg(long = "grid-cells")]
    grid_cells: Option<usize>,
    /// Override the final time.
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Seed recorded in reports (runs are deterministic either way).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Suppress the summary on stdout.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Directory holding the bundled scenario files.
    #[arg(long, default_value = "scenarios")]
    scenarios: PathBuf,
    /// Root directory for the verification runs' outputs.
    #[arg(long, default_value = "out/verify")]
    out: PathBuf,
    /// Override the radial cell count for every run.
    #[arg(long = "grid-cells")]
    grid_cells: Option<usize>,
    /// Override the final time for every run.
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Seed recorded in reports.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print only the final pass/fail lines.
    #[arg(long)]
    quiet: bool,
    /// Run a single criterion (1–12) instead of all of them.
    #[arg(long)]
    only: Option<usize>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            grid_cells: self.grid_cells,
            t_end: self.t_end,
            seed: self.seed,
            quiet: self.quiet,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Classify(args) => finish(
            pipeline::cmd_classify(&args.config, &args.overrides()).map(|_| ()),
        ),
        Command::Run(args) => finish(
            pipeline::cmd_run(&args.config, &args.overrides()).map(|_| ()),
        ),
        Command::Profile(args) => finish(
            pipeline::cmd_profile(&args.config, &args.overrides()).map(|_| ()),
        ),
        Command::Verify(args) => verify(args),
    }
}

fn finish(res: Result<(), pipeline::PipelineError>) -> ExitCode {
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn verify(args: VerifyArgs) -> ExitCode {
    if let Some(id) = args.only {
        if !(1..=12).contains(&id) {
            eprintln!("error: --only takes a criterion number between 1 and 12");
            return ExitCode::from(2);
        }
    }
    let suite = Suite::new(SuiteConfig {
        scenarios_dir: args.scenarios,
        out_root: args.out,
        grid_cells: args.grid_cells,
        t_end: args.t_end,
        seed: args.seed,
    });
    let outcomes = match args.only {
        Some(id) => vec![suite.criterion(id)],
        None => suite.run_all(),
    };
    let mut all = true;
    for o in &outcomes {
        println!("{}", o.line());
        all &= o.passed;
    }
    if !args.quiet {
        println!(
            "verify: {}/{} criteria passed",
            outcomes.iter().filter(|o| o.passed).count(),
            outcomes.len()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
