use std::path::PathBuf;

use clap::{Parser, Subcommand};

use jdbayes::config::ExperimentConfig;
use jdbayes::{report, runner, CliError};
use jdbayes_core::fisher::fisher_info;
use jdbayes_core::quad::QuadSpec;

#[derive(Parser)]
#[command(
    name = "jdbayes",
    version,
    about = "Simulate small-noise jump-diffusions and estimate drift, diffusion, and jump \
             parameters by staged Bayes posterior means"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the replication grid and write results.csv, summary.csv, assumptions.txt
    Run {
        /// Experiment configuration (JSON)
        #[arg(long)]
        config: PathBuf,
        /// Worker threads for replications (default: one per core)
        #[arg(long)]
        jobs: Option<usize>,
        /// Also write each simulated path to OUT/paths/
        #[arg(long)]
        dump_paths: bool,
        /// Also write every chain trace to OUT/chains/
        #[arg(long)]
        dump_chains: bool,
        /// Output directory (overrides out_dir from the config)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a configuration and print its assumption report
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the information blocks I0..I3 at theta0
    Fisher {
        #[arg(long)]
        config: PathBuf,
    },
}

fn cmd_run(
    config: PathBuf,
    jobs: Option<usize>,
    dump_paths: bool,
    dump_chains: bool,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let mut cfg = ExperimentConfig::load(&config)?;
    cfg.dump_paths |= dump_paths;
    cfg.dump_chains |= dump_chains;
    let model = cfg.validate()?;
    let out_dir = out
        .or_else(|| cfg.out_dir.clone())
        .ok_or_else(|| CliError::Config("no output directory: pass --out or set out_dir".into()))?;
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", out_dir.display())))?;

    let rows = runner::run_replications(&cfg, &model, jobs, Some(&out_dir))?;
    let write = |name: &str, text: &str| -> Result<(), CliError> {
        std::fs::write(out_dir.join(name), text)
            .map_err(|e| CliError::Runtime(format!("cannot write {name}: {e}")))
    };
    write("results.csv", &report::results_csv(&rows))?;
    let (table, warnings) = report::summarize(&rows);
    write("summary.csv", &report::summary_csv(&table))?;
    write("assumptions.txt", &report::assumptions_text(&cfg, &model))?;

    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let failed = rows.iter().filter(|r| r.result.is_err()).count();
    if failed > 0 {
        eprintln!("warning: {failed} of {} replications failed (warning rows in results.csv)", rows.len());
    }
    print!("{}", report::summary_text(&table));
    println!(
        "\nwrote results.csv ({} rows), summary.csv, assumptions.txt to {}",
        rows.len(),
        out_dir.display()
    );
    Ok(())
}

fn cmd_validate(config: PathBuf) -> Result<(), CliError> {
    let cfg = ExperimentConfig::load(&config)?;
    let model = cfg.validate()?;
    println!("configuration OK: {} grid cells, {} replications", cfg.grid.len(), cfg.replications);
    print!("{}", report::assumptions_text(&cfg, &model));
    Ok(())
}

fn cmd_fisher(config: PathBuf) -> Result<(), CliError> {
    let cfg = ExperimentConfig::load(&config)?;
    let model = cfg.validate()?;
    let info = fisher_info(&model, &cfg.theta0, cfg.x0, 200, &QuadSpec::default())
        .map_err(|e| CliError::Runtime(format!("information quadrature: {e}")))?;
    let blocks = [
        ("I0 (initial drift)", &info.i0),
        ("I1 (drift)", &info.i1),
        ("I2 (diffusion)", &info.i2),
        ("I3 (jump)", &info.i3),
    ];
    for ((label, block), eigs) in blocks.iter().zip(info.block_eigenvalues().iter()) {
        println!("{label}:");
        for row in block.iter() {
            println!("  {row:?}");
        }
        println!("  eigenvalues: {eigs:?}");
    }
    Ok(())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    let result = match cli.cmd {
        Cmd::Run { config, jobs, dump_paths, dump_chains, out } => {
            cmd_run(config, jobs, dump_paths, dump_chains, out)
        }
        Cmd::Validate { config } => cmd_validate(config),
        Cmd::Fisher { config } => cmd_fisher(config),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
