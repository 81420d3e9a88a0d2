mod config;
mod experiments;
mod output;
mod verify;

use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "gpslab", version, about = "Experiments for the disordered generalized Poland-Scheraga model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        #[arg(long, env = "GPSLAB_WORKERS")]
        workers: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the bundled oracle suite.
    Verify,
    /// Print the config schema.
    Schema,
    /// Print the column manifest for every experiment.
    Manifest,
}

const EXIT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, workers, out } => run(&config, workers, &out),
        Command::Verify => {
            let checks = verify::suite();
            for c in &checks {
                println!(
                    "{} {:<36} cases {:>4}  max error {:.3e}  tolerance {:.1e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.cases,
                    c.max_error,
                    c.tolerance
                );
            }
            if checks.iter().all(|c| c.pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED)
            }
        }
        Command::Schema => {
            println!("{}", serde_json::to_string_pretty(&config::schema()).expect("schema serializes"));
            ExitCode::SUCCESS
        }
        Command::Manifest => {
            print!("{}", output::manifest_text());
            ExitCode::SUCCESS
        }
    }
}

fn run(path: &Path, workers: Option<usize>, out: &Path) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let validated = match config::parse(&text).and_then(config::validate) {
        Ok(v) => v,
        Err(errors) => {
            for e in errors {
                eprintln!("config error: {e}");
            }
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if workers == Some(0) {
        eprintln!("config error: --workers: must be at least 1");
        return ExitCode::from(EXIT_CONFIG);
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(EXIT_FAILED);
        }
    };
    let start = Instant::now();
    let result = pool.install(|| experiments::run(&validated));
    let wall = start.elapsed().as_secs_f64();
    let table = match result {
        Ok(t) => t,
        Err(e) => {
            if e.source.is_numeric() {
                eprintln!("numeric error: {e}");
                return ExitCode::from(EXIT_NUMERIC);
            }
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let written = match output::write_all(out, &validated.config, &table, pool.current_num_threads(), wall) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: writing results: {e}");
            return ExitCode::from(EXIT_FAILED);
        }
    };
    println!("wrote {}", written.data.display());
    println!("wrote {}", written.sidecar.display());
    println!("wrote {}", written.plot.display());
    println!("wrote {}", written.manifest.display());
    if validated.config.experiment == config::Experiment::OracleVerify && table.summary["failed"] != 0 {
        eprintln!("oracle suite reported failures");
        return ExitCode::from(EXIT_FAILED);
    }
    ExitCode::SUCCESS
}
