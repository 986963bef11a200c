use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fppflow_lab::literal::{format_table, heavy_tail_table};
use fppflow_lab::{run, Config, LabError, RunOptions};

#[derive(Parser)]
#[command(name = "fppflow", version, about = "Maximal flows in first-passage capacity fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Experiment configuration (TOML) or a manifest.json from an earlier run.
    #[arg(long)]
    config: PathBuf,
    /// Override the base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Artifact directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Override the lattice dimension.
    #[arg(long)]
    dimension: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment a configuration describes.
    Run(RunArgs),
    /// Re-evaluate one seed and print its sample records.
    Replay {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
    EstimateNu(RunArgs),
    TruncationLadder(RunArgs),
    Continuity(RunArgs),
    EstimateNuTilde(RunArgs),
    Convexity(RunArgs),
    Domination(RunArgs),
    OracleDuality(RunArgs),
    Subadditivity(RunArgs),
    Surgery(RunArgs),
    ZeroRegime(RunArgs),
    Annulus(RunArgs),
    Animal(RunArgs),
    /// Write a quantile table.
    #[command(subcommand)]
    Table(TableCommand),
}

#[derive(Subcommand)]
enum TableCommand {
    /// Quantized law with `P(T > t) ~ 1/sqrt(t)`, which has infinite mean.
    HeavyTail {
        #[arg(long, default_value_t = 1024)]
        steps: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn base_dir(config: &Path) -> PathBuf {
    config.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn load(args: &RunArgs, kind: Option<&str>) -> Result<Config, LabError> {
    let mut cfg = Config::load(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(d) = args.dimension {
        cfg.dimension = d;
    }
    if let Some(k) = kind {
        if cfg.experiment.kind() != k {
            return Err(LabError::Config(format!(
                "configuration describes `{}`, not `{k}`",
                cfg.experiment.kind()
            )));
        }
    }
    Ok(cfg)
}

fn run_cmd(args: &RunArgs, kind: Option<&str>) -> Result<i32, LabError> {
    let cfg = load(args, kind)?;
    let opts = RunOptions {
        base: base_dir(&args.config),
        out: args.out.clone(),
        workers: args.workers,
        only_seed: None,
    };
    let outcome = run(cfg, &opts)?;
    print!("{}", outcome.summary(Some(&args.config)));
    Ok(outcome.exit_code())
}

fn replay(config: &Path, seed: u64, workers: Option<usize>) -> Result<i32, LabError> {
    let cfg = Config::load(config)?;
    let opts = RunOptions { base: base_dir(config), out: None, workers, only_seed: Some(seed) };
    let outcome = run(cfg, &opts)?;
    if outcome.report.samples.is_empty() {
        return Err(LabError::Config(format!("seed {seed} is not among the configured replicates")));
    }
    for s in &outcome.report.samples {
        println!("{}", s.to_json_line());
    }
    eprint!("{}", outcome.summary(Some(config)));
    Ok(if outcome.report.exact_passed() { 0 } else { 1 })
}

fn dispatch(cli: Cli) -> Result<i32, LabError> {
    match cli.command {
        Command::Run(a) => run_cmd(&a, None),
        Command::Replay { config, seed, workers } => replay(&config, seed, workers),
        Command::EstimateNu(a) => run_cmd(&a, Some("estimate_nu")),
        Command::TruncationLadder(a) => run_cmd(&a, Some("truncation_ladder")),
        Command::Continuity(a) => run_cmd(&a, Some("continuity")),
        Command::EstimateNuTilde(a) => run_cmd(&a, Some("estimate_nu_tilde")),
        Command::Convexity(a) => run_cmd(&a, Some("convexity")),
        Command::Domination(a) => run_cmd(&a, Some("domination")),
        Command::OracleDuality(a) => run_cmd(&a, Some("oracle_duality")),
        Command::Subadditivity(a) => run_cmd(&a, Some("subadditivity")),
        Command::Surgery(a) => run_cmd(&a, Some("surgery")),
        Command::ZeroRegime(a) => run_cmd(&a, Some("zero_regime")),
        Command::Annulus(a) => run_cmd(&a, Some("annulus")),
        Command::Animal(a) => run_cmd(&a, Some("animal")),
        Command::Table(TableCommand::HeavyTail { steps, out }) => {
            if steps == 0 {
                return Err(LabError::Config("steps must be positive".into()));
            }
            std::fs::write(&out, format_table(&heavy_tail_table(steps)))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("fppflow: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
