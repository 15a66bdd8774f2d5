use clap::{Parser, Subcommand};
use qubofoil_cli::config::RunConfig;
use qubofoil_cli::pipeline;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qubofoil",
    version,
    about = "Compile continuous design problems to QUBO form, solve, and report"
)]
struct Cli {
    /// Run configuration (TOML). Defaults to ./qubofoil.toml.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the configured backend (bruteforce|sa|gd|isingdyn).
    #[arg(long, global = true)]
    backend: Option<String>,

    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for replica/block parallelism (0 = all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic sample CSV from a built-in oracle.
    Synth,
    /// Fit polynomial surrogates to the sample data.
    Fit,
    /// Compile surrogates into (optionally hardware-adapted) QUBOs.
    Compile,
    /// Minimize the first objective's compiled problem.
    Solve,
    /// Block-compose the weight scenarios, solve once, extract the front.
    Pareto,
    /// Collect artifacts into the run report and plot data.
    Report,
    /// Run every stage in order.
    All,
}

fn load_config(cli: &Cli) -> qubofoil_cli::Result<RunConfig> {
    let path = cli
        .config
        .clone()
        .unwrap_or_else(|| PathBuf::from("qubofoil.toml"));
    let mut cfg = RunConfig::load(&path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(backend) = &cli.backend {
        cfg.backend = backend.clone();
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.display().to_string();
    }
    if let Some(workers) = cli.workers {
        cfg.workers = workers;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> qubofoil_cli::Result<()> {
    let cfg = load_config(cli)?;
    std::fs::create_dir_all(cfg.out_path())
        .map_err(|e| qubofoil_cli::CliError::Config(format!("output dir: {e}")))?;
    match cli.command {
        Command::Synth => {
            let path = pipeline::cmd_synth(&cfg)?;
            println!("{}", path.display());
        }
        Command::Fit => {
            pipeline::cmd_fit(&cfg)?;
            println!("{}", cfg.out_path().join("fit.json").display());
        }
        Command::Compile => {
            pipeline::cmd_compile(&cfg)?;
            println!("{}", cfg.out_path().join("compile.json").display());
        }
        Command::Solve => {
            let artifact = pipeline::cmd_solve(&cfg)?;
            for (name, value) in &artifact.decoded.values {
                println!("{name} = {value}");
            }
            println!("{}", cfg.out_path().join("solve.json").display());
        }
        Command::Pareto => {
            let artifact = pipeline::cmd_pareto(&cfg)?;
            println!(
                "front: {} of {} points non-dominated",
                artifact.pareto.non_dominated().count(),
                artifact.pareto.points.len()
            );
            println!("{}", cfg.out_path().join("pareto.json").display());
        }
        Command::Report => {
            pipeline::cmd_report(&cfg)?;
            println!("{}", cfg.out_path().join("report.json").display());
        }
        Command::All => {
            pipeline::cmd_all(&cfg)?;
            println!("{}", cfg.out_path().join("report.json").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
