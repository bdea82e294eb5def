//! Command-line harness: dataset generation, trials, sweeps and report
//! rendering.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 on
//! runtime failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use htm_sp::dataset::build_dataset;
use htm_sp::error::Error;
use htm_sp::experiment::{
    load_config, run_sweep, run_trial, summarize_output_dir, BackendKind, ExperimentConfig, Mode,
};

#[derive(Parser)]
#[command(name = "htm-sp", version, about = "Spatial Pooler video classification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Experiment config file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the configured backend.
    #[arg(long, value_parser = parse_backend)]
    backend: Option<BackendKind>,
    /// Override the configured mode.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// Override the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the pooler base seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic dataset described by the config.
    Generate {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the configured trial(s) and write F1 reports and profiles.
    Run {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the configured parameter sweep on both backends.
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Print a summary of a previously written output directory.
    Report {
        /// Output directory to summarize.
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_backend(s: &str) -> Result<BackendKind, String> {
    match s {
        "sequential" => Ok(BackendKind::Sequential),
        "parallel" => Ok(BackendKind::Parallel),
        other => Err(format!(
            "unknown backend '{other}', expected sequential|parallel"
        )),
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "single" | "single_htm" => Ok(Mode::SingleHtm),
        "multi" | "multi_htm" => Ok(Mode::MultiHtm),
        "svm-only" | "svm_only" => Ok(Mode::SvmOnly),
        other => Err(format!(
            "unknown mode '{other}', expected single|multi|svm-only"
        )),
    }
}

fn apply_overrides(mut config: ExperimentConfig, opts: &CommonOpts) -> ExperimentConfig {
    if let Some(backend) = opts.backend {
        config.backend = backend;
    }
    if let Some(mode) = opts.mode {
        config.mode = mode;
    }
    if let Some(out) = &opts.out {
        config.output_dir = out.clone();
    }
    if let Some(seed) = opts.seed {
        config.sp.rng_seed = seed;
    }
    config
}

/// Usage/config errors exit 1, runtime failures exit 2.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Format(_) => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    match cli.command {
        Command::Generate { common } => {
            let config = load_config(&common.config).map_err(|e| (1, e.to_string()))?;
            let config = apply_overrides(config, &common);
            let mut spec = config
                .dataset
                .spec
                .clone()
                .ok_or((1, "config has no dataset.spec to generate from".to_string()))?;
            if let Some(seed) = common.seed {
                spec.rng_seed = seed;
            }
            let root = common.out.unwrap_or_else(|| config.dataset.path.clone());
            let entries =
                build_dataset(&spec, &root).map_err(|e| (exit_code_for(&e), e.to_string()))?;
            println!(
                "generated {} videos ({} classes x {}) under {}",
                entries.len(),
                spec.classes.len(),
                spec.videos_per_class,
                root.display()
            );
            Ok(())
        }
        Command::Run { common } => {
            let config = load_config(&common.config).map_err(|e| (1, e.to_string()))?;
            let config = apply_overrides(config, &common);
            let outcome = run_trial(&config).map_err(|e| (exit_code_for(&e), e.to_string()))?;
            println!(
                "mode={} backend={} trials={} f1_mean={:.4} f1_std={:.4}",
                config.mode.as_str(),
                config.backend.as_str(),
                config.trials,
                outcome.f1_mean,
                outcome.f1_std
            );
            println!("reports written to {}", config.output_dir.display());
            Ok(())
        }
        Command::Sweep { common } => {
            let config = load_config(&common.config).map_err(|e| (1, e.to_string()))?;
            let config = apply_overrides(config, &common);
            let rows = run_sweep(&config).map_err(|e| (exit_code_for(&e), e.to_string()))?;
            println!(
                "sweep finished: {} rows written to {}",
                rows.len(),
                config.output_dir.join("sweep_summary.csv").display()
            );
            for row in &rows {
                println!(
                    "  {}={} {}: f1={:.4} kernel={:.0}ns speedup_kernel={:.2} speedup_total={:.2}",
                    row.param,
                    row.value,
                    row.backend,
                    row.f1_mean,
                    row.kernel_ns,
                    row.speedup_kernel,
                    row.speedup_total
                );
            }
            Ok(())
        }
        Command::Report { out } => {
            let text =
                summarize_output_dir(&out).map_err(|e| (exit_code_for(&e), e.to_string()))?;
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error path with status 0
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
