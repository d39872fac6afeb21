use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Parser, Subcommand};
use dqtrade::compare::compare_strategies;
use dqtrade::config::{parse_config_with, AgentKind, ExperimentConfig, SyntheticModel, SyntheticSettings};
use dqtrade::data::{load_csv, save_csv, write_csv};
use dqtrade::error::{Error, Result, Stage, StageExt};
use dqtrade::experiment::{
    evaluate, load_bars, prepare, prepare_train, run_experiment, select_window, train, Model, Report,
};
use dqtrade::model_io::{load_checkpoint, read_history, read_qtable, write_history};
use dqtrade::report::{
    emit_report, write_model, MetricsDocument, CHECKPOINT_FILE, HISTORY_FILE, METRICS_FILE, QTABLE_FILE,
};
use dqtrade_core::market_data::synthetic::generate_synthetic;

/// Deep Q-learning trading experiments on daily price data.
///
/// `train`, `evaluate` and `run` also accept config overrides as
/// `--dotted.key=value`, e.g. `--training.episodes=50`.
#[derive(Parser)]
#[command(name = "dqtrade", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a price CSV and print a summary.
    Ingest { csv: PathBuf },
    /// Write a synthetic price fixture as CSV.
    Synth {
        #[arg(long, value_enum, default_value = "sinusoid")]
        model: ModelArg,
        #[arg(long, default_value_t = 300)]
        length: usize,
        #[arg(long, default_value = "2019-01-01")]
        start: NaiveDate,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = "SYN")]
        symbol: String,
        #[arg(long, default_value_t = 100.0)]
        base: f64,
        #[arg(long, default_value_t = 10.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 10.0)]
        period: f64,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0.0)]
        drift: f64,
        #[arg(long, default_value_t = 0.2)]
        volatility: f64,
        #[arg(long, default_value_t = 1.0 / 252.0)]
        dt: f64,
        #[arg(long, default_value_t = 1_000_000.0)]
        volume: f64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train the configured agent and save the model and history.
    Train(RunArgs),
    /// Evaluate a saved model and write the report.
    Evaluate {
        #[command(flatten)]
        run: RunArgs,
        /// Directory holding the output of `train`.
        #[arg(long)]
        model: PathBuf,
    },
    /// Train, evaluate and write the report.
    Run(RunArgs),
    /// Compare the test-window metrics of several report directories.
    Compare {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
        /// Also write the table as CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModelArg {
    Sinusoid,
    Trend,
    Gbm,
}

const OWN_FLAGS: [&str; 4] = ["config", "out", "seed", "model"];

/// Pulls `--dotted.key=value` overrides out of the argument list.
fn split_overrides(args: Vec<String>) -> (Vec<String>, Vec<(String, String)>) {
    let takes_overrides = matches!(args.get(1).map(String::as_str), Some("train" | "evaluate" | "run"));
    if !takes_overrides {
        return (args, Vec::new());
    }
    let mut kept = Vec::new();
    let mut overrides = Vec::new();
    for arg in args {
        let pair = arg.strip_prefix("--").and_then(|a| a.split_once('='));
        match pair {
            Some((k, v)) if !OWN_FLAGS.contains(&k) => overrides.push((k.to_string(), v.to_string())),
            _ => kept.push(arg),
        }
    }
    (kept, overrides)
}

fn load_config(args: &RunArgs, overrides: &[(String, String)]) -> Result<ExperimentConfig> {
    let mut overrides = overrides.to_vec();
    if let Some(seed) = args.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    parse_config_with(&args.config, &overrides).stage(Stage::Ingest)
}

fn out_dir(args: &RunArgs, cfg: &ExperimentConfig) -> PathBuf {
    args.out.clone().unwrap_or_else(|| cfg.default_output_dir())
}

fn summarize(report: &Report, dir: &Path) {
    println!(
        "{} {} test {}..={} -> {}",
        report.symbol,
        report.config.agent.name(),
        report.test_window.start,
        report.test_window.end,
        dir.display()
    );
    for s in &report.strategies {
        println!("  {:<14} test roi {}", s.name, s.test.metrics.roi);
    }
}

fn load_model(cfg: &ExperimentConfig, dir: &Path) -> Result<Model> {
    Ok(match cfg.agent {
        AgentKind::Dqn => Model::Dqn(load_checkpoint(dir.join(CHECKPOINT_FILE))?),
        AgentKind::Qtable => {
            let path = dir.join(QTABLE_FILE);
            let file = std::fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
            Model::Tabular(read_qtable(file)?)
        }
        AgentKind::BuyAndHold => Model::BuyAndHold,
        AgentKind::SmaCrossover => Model::SmaCrossover,
    })
}

fn execute(command: Command, overrides: &[(String, String)]) -> Result<()> {
    match command {
        Command::Ingest { csv } => {
            let bars = load_csv(&csv).stage(Stage::Ingest)?;
            let dates = bars.dates();
            println!("{}: {} bars, {}..={}", bars.symbol(), bars.len(), dates[0], dates[dates.len() - 1]);
        }
        Command::Synth {
            model,
            length,
            start,
            seed,
            symbol,
            base,
            amplitude,
            period,
            noise,
            drift,
            volatility,
            dt,
            volume,
            out,
        } => {
            let settings = SyntheticSettings {
                symbol,
                model: match model {
                    ModelArg::Sinusoid => SyntheticModel::Sinusoid,
                    ModelArg::Trend => SyntheticModel::Trend,
                    ModelArg::Gbm => SyntheticModel::Gbm,
                },
                length,
                start,
                volume,
                seed,
                base,
                amplitude,
                period,
                noise,
                drift,
                volatility,
                dt,
            };
            let bars = generate_synthetic(&settings.spec(), seed)
                .map_err(Error::from)
                .stage(Stage::Ingest)?;
            match out {
                Some(path) => save_csv(&bars, path).stage(Stage::Report)?,
                None => write_csv(&bars, std::io::stdout().lock()).stage(Stage::Report)?,
            }
        }
        Command::Train(args) => {
            let cfg = load_config(&args, overrides)?;
            let bars = load_bars(&cfg).stage(Stage::Ingest)?;
            let data = select_window(&bars, "train", cfg.train)
                .and_then(|train_bars| prepare_train(&cfg, &train_bars))
                .stage(Stage::Ingest)?;
            let (model, history) = train(&cfg, &data).stage(Stage::Train)?;
            let dir = out_dir(&args, &cfg);
            let save = || -> Result<()> {
                std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
                write_model(&model, &dir)?;
                let path = dir.join(HISTORY_FILE);
                let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
                write_history(&history, file)?;
                let mut echo = serde_json::to_string_pretty(&cfg.resolved())?;
                echo.push('\n');
                let path = dir.join(dqtrade::report::CONFIG_ECHO_FILE);
                std::fs::write(&path, echo).map_err(|e| Error::io(&path, e))
            };
            save().stage(Stage::Report)?;
            println!("trained {} for {} episode(s) -> {}", cfg.agent.name(), history.len(), dir.display());
        }
        Command::Evaluate { run, model } => {
            let cfg = load_config(&run, overrides)?;
            let bars = load_bars(&cfg).stage(Stage::Ingest)?;
            let data = prepare(&cfg, &bars).stage(Stage::Ingest)?;
            let trained = load_model(&cfg, &model).stage(Stage::Evaluate)?;
            let history_path = model.join(HISTORY_FILE);
            let history = match std::fs::File::open(&history_path) {
                Ok(file) => read_history(file).stage(Stage::Evaluate)?,
                Err(_) => Vec::new(),
            };
            let report = evaluate(&cfg, &data, trained, history).stage(Stage::Evaluate)?;
            let dir = out_dir(&run, &cfg);
            emit_report(&report, &dir).stage(Stage::Report)?;
            summarize(&report, &dir);
        }
        Command::Run(args) => {
            let cfg = load_config(&args, overrides)?;
            let report = run_experiment(&cfg)?;
            let dir = out_dir(&args, &cfg);
            emit_report(&report, &dir).stage(Stage::Report)?;
            summarize(&report, &dir);
        }
        Command::Compare { dirs, out } => {
            let docs = dirs
                .iter()
                .map(|d| {
                    let label = d.file_name().map_or_else(|| d.display().to_string(), |n| n.to_string_lossy().into_owned());
                    MetricsDocument::load(d.join(METRICS_FILE)).map(|doc| (label, doc))
                })
                .collect::<Result<Vec<_>>>()
                .stage(Stage::Ingest)?;
            let table = compare_strategies(&docs).stage(Stage::Report)?;
            print!("{}", table.to_text());
            if let Some(path) = out {
                let csv = table.to_csv().stage(Stage::Report)?;
                std::fs::write(&path, csv).map_err(|e| Error::io(&path, e)).stage(Stage::Report)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let (args, overrides) = split_overrides(std::env::args().collect());
    let cli = Cli::parse_from(args);
    match execute(cli.command, &overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
