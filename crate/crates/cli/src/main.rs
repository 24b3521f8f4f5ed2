use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use hamca_cli::{emit_report, exit, load_config, run, Format, Kind};

/// Runs one experiment and writes its report.
#[derive(Parser, Debug)]
#[command(name = "hamca", version, about)]
struct Cli {
    /// Experiment kind; must match `kind` in the configuration.
    #[arg(value_enum)]
    verb: Kind,
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.path`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized instances.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report and artifact format; overrides `output.format`.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load_config(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("invalid configuration {}:\n{e}", cli.config.display());
            return ExitCode::from(exit::CONFIG_INVALID);
        }
    };
    if config.kind != cli.verb {
        eprintln!(
            "invalid configuration {}:\nkind: `{}` does not match verb `{}`",
            cli.config.display(),
            config.kind,
            cli.verb
        );
        return ExitCode::from(exit::CONFIG_INVALID);
    }
    let Some(dir) = cli.out.clone().or_else(|| config.output.path.clone()) else {
        eprintln!("invalid configuration {}:\noutput.path: required unless --out is given", cli.config.display());
        return ExitCode::from(exit::CONFIG_INVALID);
    };
    let format = cli.format.or(config.output.format).unwrap_or_default();

    let start = Instant::now();
    let (mut report, artifacts) = match run(&config, cli.seed, format) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::CHECK_FAILED);
        }
    };
    report.wall_time = Some(start.elapsed());
    if let Err(e) = emit_report(&report, &artifacts, &dir, format) {
        eprintln!("error: {e}");
        return ExitCode::from(exit::CHECK_FAILED);
    }
    for check in &report.checks {
        let verdict = match (check.passed, check.informational) {
            (true, true) => "info",
            (true, false) => "pass",
            (false, _) => "FAIL",
        };
        eprintln!("[{verdict}] {}: {}", check.name, check.detail);
    }
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    if report.passed {
        ExitCode::from(exit::PASSED)
    } else {
        ExitCode::from(exit::CHECK_FAILED)
    }
}
