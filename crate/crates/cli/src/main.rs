//! `qgibbs`: quantile forecasting by Gibbs aggregation, backtests, synthetic
//! data and empirical checks of the bounds.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or data error.
//! Errors are printed to stderr as a JSON object.

mod commands;
mod config;
mod error;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qgibbs::lab::Verdict;
use qgibbs::Quarter;
use serde_json::json;

use config::{CommandKind, Model, RunConfig};
use error::{CliError, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED};

#[derive(Parser, Debug)]
#[command(name = "qgibbs", version, about = "Gibbs-aggregated quantile forecasts and PAC-Bayes bound checks")]
struct Cli {
    /// TOML or JSON run configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quantile forecasts for the period after the last observation.
    Forecast(ModelArgs),
    /// Rolling out-of-sample backtest with metrics and fan-chart bands.
    Backtest(ModelArgs),
    /// Write a bounded AR(1) series.
    Simulate(SimulateArgs),
    /// Run the empirical checks and bound evaluations.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Quarterly CSV (`period,gdp_growth,climate` for the gdp model).
    #[arg(long, value_name = "PATH")]
    data: Option<PathBuf>,
    /// Monthly `month,value` climate CSV, averaged onto quarters.
    #[arg(long, value_name = "PATH")]
    climate: Option<PathBuf>,
    /// `gdp` or `ar<order>`.
    #[arg(long)]
    model: Option<Model>,
    /// Value column for `ar<order>` models.
    #[arg(long)]
    column: Option<String>,
    /// Comma-separated quantile levels.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    taus: Option<Vec<f64>>,
    /// Radius of the comparison ball [default: 100].
    #[arg(long = "B", value_name = "REAL")]
    ball: Option<f64>,
    /// Importance draws per fit [default: 100000].
    #[arg(long, value_name = "N")]
    samples: Option<usize>,
    /// Proposal variance [default: 1.0].
    #[arg(long, value_name = "REAL")]
    proposal_var: Option<f64>,
    /// First reported period, e.g. 2000Q1.
    #[arg(long, value_name = "PERIOD")]
    start: Option<Quarter>,
    /// Also write the fan chart as SVG.
    #[arg(long)]
    svg: bool,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Innovation bound: innovations are uniform on [-b, b].
    #[arg(long)]
    b: Option<f64>,
    /// Series length.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    oracle_replications: Option<usize>,
    #[arg(long)]
    oracle_n: Option<usize>,
    #[arg(long)]
    mgf_replications: Option<usize>,
}

fn merge_model(cfg: &mut RunConfig, a: ModelArgs) {
    if a.data.is_some() {
        cfg.data = a.data;
    }
    if a.climate.is_some() {
        cfg.climate = a.climate;
    }
    if let Some(m) = a.model {
        cfg.model = m;
    }
    if let Some(c) = a.column {
        cfg.column = c;
    }
    if let Some(t) = a.taus {
        cfg.taus = t;
    }
    if let Some(b) = a.ball {
        cfg.ball = b;
    }
    if let Some(n) = a.samples {
        cfg.samples = n;
    }
    if let Some(v) = a.proposal_var {
        cfg.proposal_var = v;
    }
    if a.start.is_some() {
        cfg.start = a.start;
    }
    cfg.svg |= a.svg;
}

fn build_config(cli: Cli) -> Result<(RunConfig, Command, PathBuf), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let kind = match &cli.command {
        Command::Forecast(_) => CommandKind::Forecast,
        Command::Backtest(_) => CommandKind::Backtest,
        Command::Simulate(_) => CommandKind::Simulate,
        Command::Verify(_) => CommandKind::Verify,
    };
    cfg.command = Some(kind);
    Ok((cfg, cli.command, cli.out))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let (mut cfg, command, out) = build_config(cli)?;
    let (artifacts, status) = match command {
        Command::Forecast(a) | Command::Backtest(a) => {
            merge_model(&mut cfg, a);
            cfg.validate()?;
            let paths = if cfg.command == Some(CommandKind::Forecast) {
                commands::forecast(&cfg, &out)?
            } else {
                commands::backtest(&cfg, &out)?
            };
            (paths, "ok")
        }
        Command::Simulate(a) => {
            let s = &mut cfg.simulate;
            s.a = a.a.unwrap_or(s.a);
            s.b = a.b.unwrap_or(s.b);
            s.n = a.n.unwrap_or(s.n);
            (commands::simulate(&cfg, &out)?, "ok")
        }
        Command::Verify(a) => {
            cfg.epsilon = a.epsilon.unwrap_or(cfg.epsilon);
            let v = &mut cfg.verify;
            v.oracle_replications = a.oracle_replications.unwrap_or(v.oracle_replications);
            v.oracle_n = a.oracle_n.unwrap_or(v.oracle_n);
            v.mgf_replications = a.mgf_replications.unwrap_or(v.mgf_replications);
            cfg.validate()?;
            let outcome = commands::verify(&cfg, &out)?;
            let status = match outcome.verdict {
                Verdict::Pass => "pass",
                Verdict::Inconclusive => "inconclusive",
                Verdict::Fail => "fail",
            };
            (outcome.artifacts, status)
        }
    };
    let summary = json!({
        "status": status,
        "artifacts": artifacts.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    });
    println!("{summary}");
    Ok(if status == "fail" { EXIT_VERIFY_FAILED } else { EXIT_OK })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
