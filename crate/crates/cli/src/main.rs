//! `linkcusum` command-line front end.
//!
//! Exit codes: 0 = null retained (or success), 1 = null rejected by `test`,
//! 2 = usage or input error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use linkcusum::asymptotics::kolmogorov_quantile;
use linkcusum::bootstrap::{run_test, BootstrapConfig, Resampling};
use linkcusum::estimator::estimate_links;
use linkcusum::panel::{default_grid, load_panels, Pairing, PanelFormat, PanelPair, PanelSource, DEFAULT_GRID_SIZE};
use linkcusum::simulation::{
    power_study, write_power_csv, Alternative, AlternativeRates, Model, ScenarioConfig, SmoothForm,
};

#[derive(Debug, Parser)]
#[command(
    name = "linkcusum",
    version,
    about = "CUSUM test for a time-varying monotone link between two panels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the bootstrap test on a pair of panels and print a JSON report.
    Test(TestArgs),
    /// Monte Carlo power study over a grid of scenarios; writes CSV.
    Simulate(SimulateArgs),
    /// Quantiles of the sup of a Brownian bridge.
    Critvals(CritvalsArgs),
    /// Link estimates ĥ_t(x_i) as long CSV `t,x,h_hat`.
    Hplot(HplotArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Long CSV with both panels, or the X panel when `--format wide`.
    input: PathBuf,
    #[arg(long, default_value = "long", value_parser = parse_format)]
    format: PanelFormat,
    /// Y panel file for `--format wide`.
    #[arg(long)]
    y_input: Option<PathBuf>,
    /// Panels observe the same subjects; resample subject pairs jointly.
    #[arg(long)]
    paired: bool,
    /// Number of evaluation points.
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    grid: usize,
    /// Output path, `-` for standard output.
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Debug, Args)]
struct TestArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Bootstrap replications B.
    #[arg(long, default_value_t = 200)]
    bootstrap: usize,
    /// Master seed; drawn from system entropy and reported when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// pooled | rotated | trajectories
    #[arg(long, default_value = "rotated", value_parser = parse_resampling)]
    resampling: Resampling,
    /// Also write the bootstrap replicates as one-column CSV.
    #[arg(long)]
    boot_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_delimiter = ',', default_value = "iid_gaussian", value_parser = parse_model)]
    model: Vec<Model>,
    #[arg(long = "alt", value_delimiter = ',', default_value = "null", value_parser = parse_alternative)]
    alternatives: Vec<Alternative>,
    /// Subjects per panel.
    #[arg(long = "N", value_delimiter = ',', default_value = "50")]
    subjects: Vec<usize>,
    /// Time lengths.
    #[arg(long = "n", value_delimiter = ',', default_value = "20")]
    times: Vec<usize>,
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    #[arg(long, default_value_t = 500)]
    reps: usize,
    #[arg(long, default_value_t = 200)]
    bootstrap: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    grid: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.01)]
    a4_rate: f64,
    #[arg(long, default_value_t = 0.05)]
    a5_rate: f64,
    /// Use exp(-r (t-1)²) instead of exp(-r (t-1)) in A4/A5.
    #[arg(long)]
    squared_smooth: bool,
    #[arg(long, default_value = "rotated", value_parser = parse_resampling)]
    resampling: Resampling,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Debug, Args)]
struct CritvalsArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.90,0.95,0.99")]
    levels: Vec<f64>,
}

#[derive(Debug, Args)]
struct HplotArgs {
    #[command(flatten)]
    input: InputArgs,
}

fn parse_format(s: &str) -> Result<PanelFormat, String> {
    s.parse().map_err(|e: linkcusum::Error| e.to_string())
}

fn parse_resampling(s: &str) -> Result<Resampling, String> {
    s.parse().map_err(|e: linkcusum::Error| e.to_string())
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse().map_err(|e: linkcusum::Error| e.to_string())
}

fn parse_alternative(s: &str) -> Result<Alternative, String> {
    s.parse().map_err(|e: linkcusum::Error| e.to_string())
}

#[derive(Debug)]
struct CliError(String);

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError(msg.into())
}

fn output(path: &str) -> CliResult<Box<dyn Write>> {
    if path == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        let file = File::create(path).map_err(|e| usage(format!("{path}: {e}")))?;
        Ok(Box::new(BufWriter::new(file)))
    }
}

fn load(args: &InputArgs) -> CliResult<PanelPair> {
    if args.grid == 0 {
        return Err(usage("--grid must be at least 1"));
    }
    let source = match args.format {
        PanelFormat::Long => PanelSource::Long(args.input.clone()),
        PanelFormat::Wide => PanelSource::Wide {
            x: args.input.clone(),
            y: args
                .y_input
                .clone()
                .ok_or_else(|| usage("--format wide needs --y-input <Y.csv>"))?,
        },
    };
    let pairing = if args.paired {
        Pairing::Paired
    } else {
        Pairing::Independent
    };
    Ok(load_panels(&source, pairing)?)
}

fn cmd_test(args: &TestArgs) -> CliResult<ExitCode> {
    let cfg = BootstrapConfig {
        replications: args.bootstrap,
        alpha: args.alpha,
        seed: args.seed.unwrap_or_else(rand::random),
        resampling: args.resampling,
        ..Default::default()
    };
    cfg.validate()?;
    let pair = load(&args.input)?;
    let grid = default_grid(&pair, args.input.grid)?;
    let report = run_test(&pair, &grid, &cfg)?;

    for warning in &report.diagnostics.warnings {
        eprintln!("warning: {warning}");
    }
    let mut out = output(&args.input.out)?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;

    if let Some(path) = &args.boot_csv {
        let mut w = BufWriter::new(File::create(path).map_err(|e| usage(format!("{}: {e}", path.display())))?);
        writeln!(w, "boot_stat")?;
        for s in &report.boot_stats {
            writeln!(w, "{s}")?;
        }
        w.flush()?;
    }
    Ok(if report.reject {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_simulate(args: &SimulateArgs) -> CliResult<ExitCode> {
    let seed = args.seed.unwrap_or_else(rand::random);
    let rates = AlternativeRates {
        a4: args.a4_rate,
        a5: args.a5_rate,
        smooth_form: if args.squared_smooth {
            SmoothForm::Squared
        } else {
            SmoothForm::Linear
        },
    };
    let mut scenarios = Vec::new();
    for &model in &args.model {
        for &alternative in &args.alternatives {
            for &subjects in &args.subjects {
                for &times in &args.times {
                    let mut sc = ScenarioConfig::new(model, alternative, subjects, times);
                    sc.rho = args.rho;
                    sc.rates = rates;
                    sc.replications = args.reps;
                    sc.grid_size = args.grid;
                    sc.bootstrap = BootstrapConfig {
                        replications: args.bootstrap,
                        alpha: args.alpha,
                        seed,
                        resampling: args.resampling,
                        ..Default::default()
                    };
                    sc.validate()?;
                    scenarios.push(sc);
                }
            }
        }
    }
    let results = scenarios.iter().map(power_study).collect::<Result<Vec<_>, _>>()?;
    let mut out = output(&args.out)?;
    write_power_csv(&results, &mut out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_critvals(args: &CritvalsArgs) -> CliResult<ExitCode> {
    let rows = args
        .levels
        .iter()
        .map(|&p| kolmogorov_quantile(p).map(|z| (p, z)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = io::stdout().lock();
    writeln!(out, "p,z")?;
    for (p, z) in rows {
        writeln!(out, "{p},{z:.6}")?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_hplot(args: &HplotArgs) -> CliResult<ExitCode> {
    let pair = load(&args.input)?;
    let grid = default_grid(&pair, args.input.grid)?;
    let est = estimate_links(&pair, &grid);
    let mut out = output(&args.input.out)?;
    writeln!(out, "t,x,h_hat")?;
    for (t, row) in est.h_hat.iter().enumerate() {
        for (x, h) in grid.points().iter().zip(row) {
            writeln!(out, "{},{x},{h}", t + 1)?;
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Test(args) => cmd_test(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Critvals(args) => cmd_critvals(args),
        Command::Hplot(args) => cmd_hplot(args),
    };
    match result {
        Ok(code) => code,
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
