//! Command-line front end: scenario files, builtin experiments, output
//! writing and the validation and convergence harnesses.

pub mod builtins;
pub mod checks;
pub mod config;
pub mod convergence;
pub mod error;
pub mod run;

pub use config::ScenarioConfig;
pub use error::CliError;

use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "piezo", version, about = "Transient acoustic scattering by piezoelectric solids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a scenario file (or a manifest from an earlier run).
    Run {
        config: PathBuf,
        /// Output directory, overriding the one in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle and property checks.
    Validate {
        /// Include the long scenario runs (acoustic circle, pentagon, generation, linearity).
        #[arg(long)]
        all: bool,
        /// Run only these check ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
        /// Relative perturbation of the single layer operator (sensitivity test hook).
        #[arg(long, default_value_t = 0.0)]
        perturb_v: f64,
    },
    /// Observed convergence orders over the config's refinement ladder.
    Convergence {
        config: PathBuf,
        /// Where to write convergence.csv (default: the config's output directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a builtin geometry as a Gmsh 2.2 ASCII file.
    Mesh { name: String, resolution: usize, out: PathBuf },
    /// Print or write the config of a builtin experiment.
    Example { name: String, out: Option<PathBuf> },
}

/// Checks run by `validate` without `--all`.
pub const QUICK_CHECKS: [usize; 5] = [1, 2, 3, 5, 6];

pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { config, out } => {
            let cfg = run::load_config_or_manifest(&config)?;
            let (output, dir) = run::run(&cfg, out.as_deref())?;
            println!(
                "{}: {} steps, {} receivers, {} snapshots written to {}",
                output.config.name,
                output.result.times.len() - 1,
                output.result.receivers.len(),
                output.result.snapshots.len(),
                dir.display()
            );
            Ok(())
        }
        Command::Validate { all, only, perturb_v } => {
            let ids: Vec<usize> = if !only.is_empty() {
                only
            } else if all {
                (1..=10).collect()
            } else {
                QUICK_CHECKS.to_vec()
            };
            let report = checks::run_checks(&ids, checks::CheckOptions { perturb_v });
            for c in &report {
                println!("{c}");
            }
            let failed = report.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(CliError::Validation(format!("{failed} of {} checks failed", report.len())));
            }
            Ok(())
        }
        Command::Convergence { config, out } => {
            let cfg = run::load_config_or_manifest(&config)?;
            let table = convergence::convergence(&cfg)?;
            let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
            std::fs::create_dir_all(&dir)?;
            let csv = table.to_csv();
            std::fs::write(dir.join("convergence.csv"), &csv)?;
            print!("{csv}");
            println!("successive-difference orders: {:?}", table.successive_orders());
            println!("orders against finest level:  {:?}", table.reference_orders());
            if table.levels.iter().any(|l| l.oracle.is_some()) {
                println!("orders against oracle:        {:?}", table.oracle_orders());
            }
            Ok(())
        }
        Command::Mesh { name, resolution, out } => {
            let mesh = builtins::builtin_geometry(&name, Some(resolution))?;
            std::fs::write(&out, piezo_core::meshio::write_msh(&mesh))?;
            println!(
                "{name}: {} vertices, {} triangles written to {}",
                mesh.num_vertices(),
                mesh.num_triangles(),
                out.display()
            );
            Ok(())
        }
        Command::Example { name, out } => {
            let text = builtins::builtin_scenario(&name)?.to_toml();
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}
