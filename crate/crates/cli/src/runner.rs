//! The replication loop: each (cell, rep) pair is a pure function of the
//! master seed, so replications can run in any order on any number of
//! threads and still produce identical rows.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use jdbayes_core::model::ModelSpec;
use jdbayes_core::pipeline::{estimate_full, EstimationResult};
use jdbayes_core::seed::derive;
use jdbayes_core::simulate::{simulate_path, SamplePath, SimConfig};
use jdbayes_core::MCMCConfig;

use crate::config::{ExperimentConfig, GridCell};
use crate::CliError;

/// Row-level warning bit for a replication that failed outright (its
/// estimate columns are all NA).
pub const WARN_ESTIMATION_FAILED: u32 = 4;

/// One replication's outcome; `Err` carries the failure message for the
/// warning row.
#[derive(Debug, Clone, PartialEq)]
pub struct RepOutcome {
    pub cell_index: usize,
    pub cell_id: String,
    pub n: usize,
    pub epsilon: f64,
    pub lambda: f64,
    pub rep: usize,
    pub result: Result<EstimationResult, String>,
}

impl RepOutcome {
    /// The warning code shown in the CSV row: the estimation's own code,
    /// or the failure bit.
    pub fn warn_code(&self) -> u32 {
        match &self.result {
            Ok(est) => est.warn_code,
            Err(_) => WARN_ESTIMATION_FAILED,
        }
    }
}

/// Simulation seed stream for a (cell, rep) pair.
fn sim_seed(master: u64, cell_index: usize, rep: usize) -> u64 {
    derive(master, &[cell_index as u64, rep as u64, 0])
}

/// Chain master seed stream for a (cell, rep) pair (stages derive their
/// own streams from it).
fn mcmc_seed(master: u64, cell_index: usize, rep: usize) -> u64 {
    derive(master, &[cell_index as u64, rep as u64, 1])
}

fn run_one(
    model: &ModelSpec,
    cfg: &ExperimentConfig,
    cell_index: usize,
    cell: &GridCell,
    rep: usize,
    dump: Option<&Path>,
) -> Result<EstimationResult, String> {
    let sim = SimConfig::new(
        cell.n,
        cell.epsilon,
        cfg.lambda,
        cfg.x0,
        sim_seed(cfg.seed, cell_index, rep),
    )
    .and_then(|s| s.with_substeps(cfg.substeps))
    .map_err(|e| format!("simulation config: {e}"))?;
    let path = simulate_path(model, &cfg.theta0, &sim).map_err(|e| format!("simulation: {e}"))?;
    if cfg.dump_paths {
        if let Some(dir) = dump {
            dump_path(dir, &ExperimentConfig::cell_id(cell), rep, &path)
                .map_err(|e| format!("path dump: {e}"))?;
        }
    }
    let mcmc = MCMCConfig {
        seed: mcmc_seed(cfg.seed, cell_index, rep),
        record_trace: cfg.dump_chains && dump.is_some(),
        ..cfg.mcmc.clone()
    };
    let est = estimate_full(model, &path, cell.epsilon, &cfg.filter, &mcmc, cfg.psi_mode)
        .map_err(|e| format!("estimation: {e}"))?;
    if cfg.dump_chains {
        if let Some(dir) = dump {
            dump_chains(dir, &ExperimentConfig::cell_id(cell), rep, &est)
                .map_err(|e| format!("chain dump: {e}"))?;
        }
    }
    Ok(est)
}

/// Runs every (cell, replication) pair and returns the rows sorted by
/// (cell index, replication). Per-replication failures become warning
/// rows; only infrastructure problems (thread pool, dump directories)
/// error out.
pub fn run_replications(
    cfg: &ExperimentConfig,
    model: &ModelSpec,
    jobs: Option<usize>,
    dump_dir: Option<&Path>,
) -> Result<Vec<RepOutcome>, CliError> {
    if let Some(dir) = dump_dir {
        if cfg.dump_paths {
            std::fs::create_dir_all(dir.join("paths"))
                .map_err(|e| CliError::Runtime(format!("cannot create path dump dir: {e}")))?;
        }
        if cfg.dump_chains {
            std::fs::create_dir_all(dir.join("chains"))
                .map_err(|e| CliError::Runtime(format!("cannot create chain dump dir: {e}")))?;
        }
    }
    let tasks: Vec<(usize, usize)> = (0..cfg.grid.len())
        .flat_map(|c| (0..cfg.replications).map(move |r| (c, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    let mut rows: Vec<RepOutcome> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(cell_index, rep)| {
                let cell = &cfg.grid[cell_index];
                RepOutcome {
                    cell_index,
                    cell_id: ExperimentConfig::cell_id(cell),
                    n: cell.n,
                    epsilon: cell.epsilon,
                    lambda: cfg.lambda,
                    rep,
                    result: run_one(model, cfg, cell_index, cell, rep, dump_dir),
                }
            })
            .collect()
    });
    rows.sort_by(|a, b| (a.cell_index, a.rep).cmp(&(b.cell_index, b.rep)));
    Ok(rows)
}

fn dump_path(
    dir: &Path,
    cell_id: &str,
    rep: usize,
    path: &SamplePath,
) -> std::io::Result<()> {
    let file = dir.join("paths").join(format!("{cell_id}_rep{rep}.csv"));
    let mut w = std::io::BufWriter::new(std::fs::File::create(file)?);
    writeln!(w, "k,t,x")?;
    let n = path.n() as f64;
    writeln!(w, "0,0,{}", path.x0())?;
    for k in 0..path.n() {
        writeln!(w, "{},{},{}", k + 1, (k + 1) as f64 / n, path.observations[k + 1])?;
    }
    Ok(())
}

fn dump_chains(
    dir: &Path,
    cell_id: &str,
    rep: usize,
    est: &EstimationResult,
) -> std::io::Result<()> {
    for (stage, diag) in est.stages.iter().enumerate() {
        let Some(diag) = diag else { continue };
        let Some(trace) = &diag.trace else { continue };
        let file = dir.join("chains").join(format!("{cell_id}_rep{rep}_stage{stage}.csv"));
        let mut w = std::io::BufWriter::new(std::fs::File::create(file)?);
        writeln!(w, "iteration,point,log_target,accepted")?;
        for row in trace {
            let coords =
                row.point.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";");
            writeln!(w, "{},{},{},{}", row.iteration, coords, row.log_target, row.accepted)?;
        }
    }
    Ok(())
}
