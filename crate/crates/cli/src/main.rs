use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use signhdg_cli::{run_convergence_study, run_field_output, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "signhdg", about = "HDG and CG solves for sign-changing diffusion problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Refinement study with one convergence table per method.
    Study(Overrides),
    /// Field samples and an optional slice on a single level.
    Fields(Overrides),
    /// Print the resolved configuration.
    Config(Overrides),
}

/// Every flag overrides the same key in the config file.
#[derive(Args)]
struct Overrides {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// cavity | metamaterial | manufactured
    #[arg(long)]
    experiment: Option<String>,
    /// Comma-separated list of hdg, cg.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    k: Option<String>,
    /// Comma-separated, strictly increasing.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    sigma_plus: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    /// mirrored | uniform | mapped
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Cell quadrature degree, or `default`.
    #[arg(long)]
    quadrature: Option<String>,
    /// `x1=<c>`, `x2=<c>` or `none`.
    #[arg(long)]
    slice: Option<String>,
    #[arg(long)]
    slice_samples: Option<String>,
    #[arg(long)]
    lattice: Option<String>,
}

impl Overrides {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut config = RunConfig::default();
        if let Some(path) = &self.config {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::new("cli", format!("{}: {e}", path.display())))?;
            config.apply_text(&text)?;
        }
        let flags = [
            ("experiment", &self.experiment),
            ("method", &self.method),
            ("k", &self.k),
            ("levels", &self.levels),
            ("sigma_plus", &self.sigma_plus),
            ("kappa", &self.kappa),
            ("gamma", &self.gamma),
            ("pattern", &self.pattern),
            ("out", &self.out),
            ("quadrature", &self.quadrature),
            ("slice", &self.slice),
            ("slice_samples", &self.slice_samples),
            ("lattice", &self.lattice),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                config.set(key, v)?;
            }
        }
        config.validate()?;
        Ok(config)
    }
}

fn run(cli: Cli) -> Result<(), Vec<CliError>> {
    match cli.command {
        Command::Study(o) => {
            let config = o.resolve().map_err(|e| vec![e])?;
            let report = run_convergence_study(&config).map_err(|e| vec![e])?;
            for path in &report.files {
                println!("{}", path.display());
            }
            let failures: Vec<CliError> = report.failures().map(|(_, f)| f.error.clone()).collect();
            if failures.is_empty() {
                Ok(())
            } else {
                Err(failures)
            }
        }
        Command::Fields(o) => {
            let config = o.resolve().map_err(|e| vec![e])?;
            let report = run_field_output(&config).map_err(|e| vec![e])?;
            for path in &report.files {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Config(o) => {
            print!("{}", o.resolve().map_err(|e| vec![e])?.to_text());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(errors) => {
            for e in errors {
                eprintln!("error: {e}");
            }
            ExitCode::FAILURE
        }
    }
}
