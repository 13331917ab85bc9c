use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use osm::cli::{self, validate, ExperimentConfig};
use osm::{Error, Result};

/// Orthogonality-sampling imaging from synthetic scattering data.
///
/// Set OSM_THREADS to cap the number of worker threads.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize data, add noise and compute every requested image.
    Run { config: PathBuf },
    /// Run (or print with --print) one of the figure presets.
    Preset {
        name: String,
        /// `key=value`, applied on top of the preset; repeatable.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Print the resulting config instead of running it.
        #[arg(long)]
        print: bool,
    },
    /// Write the clean dataset only.
    Synthesize { config: PathBuf },
    /// Image a stored dataset.
    Image { dataset: PathBuf, config: PathBuf },
    /// Run the oracle checks.
    Validate,
    /// List preset names.
    Presets,
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("OSM_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::Config { field: "OSM_THREADS".into(), message: format!("expected a positive integer, got `{v}`") })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config { field: "OSM_THREADS".into(), message: e.to_string() })?;
    }
    Ok(())
}

fn print_report(report: &cli::RunReport) {
    println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
}

fn dispatch(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Run { config } => print_report(&cli::run(&ExperimentConfig::from_file(config)?)?),
        Command::Preset { name, overrides, print } => {
            let cfg = cli::preset(&name)?.with_overrides(&overrides)?;
            if print {
                print!("{}", cfg.to_text());
            } else {
                print_report(&cli::run(&cfg)?);
            }
        }
        Command::Synthesize { config } => print_report(&cli::synthesize(&ExperimentConfig::from_file(config)?)?),
        Command::Image { dataset, config } => print_report(&cli::image(&dataset, &ExperimentConfig::from_file(config)?)?),
        Command::Validate => {
            let checks = validate::oracle_suite()?;
            for c in &checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag}  {:<40} {:.3e} (tol {:.1e})", c.name, c.value, c.tolerance);
            }
            return Ok(checks.iter().all(|c| c.passed));
        }
        Command::Presets => {
            for n in cli::preset_names() {
                println!("{n}");
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = configure_threads().and_then(|_| dispatch(args.command));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
