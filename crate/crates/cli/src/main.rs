use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mimo_secrecy::channel::db_to_linear;
use mimo_secrecy::oracle::{DEFAULT_GRID_POINTS, DEFAULT_SAMPLES};
use mimo_secrecy::{
    run_montecarlo, solve, sweep, verify_channel, ChannelFile, ChannelInstance, Coefficient,
    Error, MonteCarloSpec, SandwichReport, SolveOptions, SweepSpec, VerifySpec,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "mimo-secrecy", version, about = "Secrecy capacity of two-antenna MIMO wiretap channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form capacity and optimal covariance as JSON.
    Solve(SolveArgs),
    /// Capacity over a range of power ratios, as CSV.
    Sweep(SweepArgs),
    /// Compare the closed form against both brute-force oracles.
    Verify(VerifyArgs),
    /// Run the oracle comparison on random channels.
    Montecarlo(MonteCarloArgs),
}

#[derive(Args)]
struct ChannelArgs {
    /// Channel file (JSON).
    #[arg(long)]
    channels: PathBuf,
    /// Power ratio in dB, overriding the file.
    #[arg(long, allow_negative_numbers = true)]
    rho_db: Option<f64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Destination file, or `-` for standard output.
    #[arg(long, default_value = "-")]
    output: String,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// Dump Gram matrices, coefficients, roots and the branch decision to stderr.
    #[arg(long)]
    debug: bool,
    /// Test hook: add this offset to coefficient q5 before solving.
    #[arg(long, allow_negative_numbers = true)]
    perturb_q5: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Channel file (JSON); its power ratio is ignored.
    #[arg(long)]
    channels: PathBuf,
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    rho_start_db: f64,
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    rho_stop_db: f64,
    #[arg(long, default_value_t = 81, value_parser = clap::value_parser!(u64).range(1..))]
    steps: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct OracleArgs {
    /// Points on the power-split grid.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    grid_points: Option<u64>,
    /// Random covariance samples.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Test hook: add this offset to coefficient q5 in the closed form.
    #[arg(long, allow_negative_numbers = true)]
    perturb_q5: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    oracle: OracleArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct MonteCarloArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n_r: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n_e: u64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    rho_db: f64,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[command(flatten)]
    oracle: OracleArgs,
    /// Directory receiving one channel file per failing trial.
    #[arg(long, default_value = ".")]
    dump_dir: PathBuf,
    #[command(flatten)]
    out: OutputArgs,
}

enum Failure {
    Input(String),
    Inconsistency(String),
    Verification(String),
    Output(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Output(_) => 1,
            Failure::Input(_) => 2,
            Failure::Inconsistency(_) => 3,
            Failure::Verification(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Inconsistency(m) | Failure::Verification(m) | Failure::Output(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Input(_) | Error::Shape(_) => Failure::Input(e.to_string()),
            _ => Failure::Inconsistency(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Output(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Montecarlo(a) => cmd_montecarlo(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn open_output(path: &str) -> Result<Box<dyn Write>, Failure> {
    if path == "-" {
        return Ok(Box::new(io::stdout().lock()));
    }
    let file = fs::File::create(path).map_err(|e| Failure::Output(format!("{path}: {e}")))?;
    Ok(Box::new(io::BufWriter::new(file)))
}

fn read_channel_file(path: &Path) -> Result<ChannelFile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    ChannelFile::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_channel(args: &ChannelArgs) -> Result<ChannelInstance, Failure> {
    let file = read_channel_file(&args.channels)?;
    Ok(file.to_instance(args.rho_db.map(db_to_linear))?)
}

fn perturbation(offset: Option<f64>) -> Option<(Coefficient, f64)> {
    offset.map(|d| (Coefficient::Q5, d))
}

fn cmd_solve(args: SolveArgs) -> CliResult {
    let ch = load_channel(&args.channel)?;
    let opts = SolveOptions {
        skip_objective_check: false,
        perturbation: perturbation(args.perturb_q5),
    };
    let solved = solve(&ch, &opts)?;
    if args.debug {
        let dump = json!({
            "branch": solved.solution.branch,
            "diagnostics": solved.diagnostics,
        });
        eprintln!("{}", serde_json::to_string_pretty(&dump).expect("diagnostics serialize"));
    }
    let mut out = open_output(&args.out.output)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&solved.solution).expect("solution serializes"))?;
    out.flush()?;
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> CliResult {
    let file = read_channel_file(&args.channels)?;
    // the sweep sets its own power ratio; any positive placeholder will do
    let ch = file.to_instance(Some(1.0))?;
    let spec = SweepSpec::new(args.rho_start_db, args.rho_stop_db, args.steps as usize)?;
    let rows = sweep(&ch, &spec)?;
    let mut w = csv::Writer::from_writer(open_output(&args.out.output)?);
    for row in &rows {
        w.serialize(row).map_err(|e| Failure::Output(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn write_sandwich(out: &mut dyn Write, r: &SandwichReport) -> io::Result<()> {
    writeln!(out, "closed_form_nats {:.12}", r.closed_form.capacity_nats)?;
    writeln!(out, "closed_form_bits {:.12}", r.closed_form.capacity_bits)?;
    writeln!(
        out,
        "grid_oracle_nats {:.12} argmax_x {} gap_bound {:.3e}",
        r.grid.best_value_nats,
        r.grid.argmax_x.unwrap_or(0.0),
        r.grid.value_gap_bound.unwrap_or(0.0)
    )?;
    writeln!(out, "direct_oracle_nats {:.12}", r.direct.best_value_nats)?;
    writeln!(out, "consistency_gap {:.3e}", r.consistency_gap)?;
    writeln!(out, "{}", if r.pass { "PASS" } else { "FAIL" })
}

fn cmd_verify(args: VerifyArgs) -> CliResult {
    let ch = load_channel(&args.channel)?;
    let spec = VerifySpec {
        grid_points: args.oracle.grid_points.map_or(DEFAULT_GRID_POINTS, |n| n as usize),
        samples: args.oracle.samples.map_or(DEFAULT_SAMPLES, |n| n as usize),
        seed: args.oracle.seed,
        perturbation: perturbation(args.oracle.perturb_q5),
    };
    let report = verify_channel(&ch, &spec)?;
    let mut out = open_output(&args.out.output)?;
    write_sandwich(&mut out, &report)?;
    out.flush()?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Verification("sandwich check failed".into()))
    }
}

fn cmd_montecarlo(args: MonteCarloArgs) -> CliResult {
    let mut spec = MonteCarloSpec::new(
        args.n_r as usize,
        args.n_e as usize,
        args.rho_db,
        args.trials as usize,
        args.oracle.seed,
    );
    if let Some(n) = args.oracle.grid_points {
        spec.grid_points = n as usize;
    }
    if let Some(n) = args.oracle.samples {
        spec.samples = n as usize;
    }
    spec.perturbation = perturbation(args.oracle.perturb_q5);
    let report = run_montecarlo(&spec)?;

    let mut out = open_output(&args.out.output)?;
    writeln!(out, "passed {}/{}", report.passed(), report.outcomes.len())?;
    writeln!(out, "max_grid_deviation_nats {:.3e}", report.max_grid_deviation())?;
    writeln!(out, "max_consistency_gap {:.3e}", report.max_consistency_gap())?;
    let worst = report.worst();
    let worst_json = json!({
        "trial": worst.index,
        "channel": ChannelFile::from_instance(&worst.channel),
    });
    writeln!(out, "worst {}", serde_json::to_string(&worst_json).expect("channel serializes"))?;
    out.flush()?;

    let failures: Vec<_> = report.failures().collect();
    if failures.is_empty() {
        return Ok(());
    }
    fs::create_dir_all(&args.dump_dir)
        .map_err(|e| Failure::Output(format!("{}: {e}", args.dump_dir.display())))?;
    for f in &failures {
        let path = args.dump_dir.join(format!("failure_{}.json", f.index));
        fs::write(&path, ChannelFile::from_instance(&f.channel).to_json())
            .map_err(|e| Failure::Output(format!("{}: {e}", path.display())))?;
    }
    Err(Failure::Verification(format!(
        "{} of {} trials failed; channels written to {}",
        failures.len(),
        report.outcomes.len(),
        args.dump_dir.display()
    )))
}
