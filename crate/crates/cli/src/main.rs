use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dirac2c_cli::oracle::{run_suite, Suite};
use dirac2c_cli::{cmd_compare, cmd_figure, cmd_simulate, CliError, CliResult, FigureName, RunConfig};

#[derive(Parser)]
#[command(name = "dirac2c", version, about = "1D Dirac and two-component TCL wave-packet simulations")]
#[command(propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write its density records and manifest.
    #[command(version)]
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output.directory`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run two configurations and compare their lower-spinor densities.
    #[command(version)]
    Compare {
        #[arg(long)]
        config_a: PathBuf,
        #[arg(long)]
        config_b: PathBuf,
        /// Defaults to `output.directory` of the first config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce a figure preset pair (Dirac vs. TCL) with heatmaps.
    #[command(version)]
    Figure {
        #[arg(value_enum)]
        name: FigureName,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a verification suite and report each criterion.
    #[command(version)]
    Oracle {
        #[arg(value_enum)]
        suite: Suite,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { config, out } => {
            let report = cmd_simulate(&RunConfig::load(&config)?, out.as_deref())?;
            let d = &report.run.outcome.diagnostics;
            println!(
                "wrote {} files to {} (norm_drift={:e}, final_leakage={:e})",
                report.files.len() + 1,
                report.directory.display(),
                d.norm_drift,
                d.final_leakage
            );
        }
        Command::Compare { config_a, config_b, out } => {
            let report = cmd_compare(&RunConfig::load(&config_a)?, &RunConfig::load(&config_b)?, out.as_deref())?;
            println!("{}", report.summary_line());
        }
        Command::Figure { name, out } => {
            let report = cmd_figure(name, &out)?;
            println!(
                "{}: normalized_l2={} max_abs_diff={} heatmap_scale={} files={}",
                name.as_str(),
                report.metrics.normalized_l2,
                report.metrics.max_abs_diff,
                report.scale,
                report.files.len() + 1
            );
        }
        Command::Oracle { suite } => {
            let results = run_suite(suite)?;
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(CliError::Oracle(format!("{failed} of {} criteria failed", results.len())));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let err = CliError::Config(e.kind().to_string());
            eprintln!("{}", err.json_line());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.json_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
