//! CSV rendering of replication rows and their per-cell summary table.
//!
//! All numbers are written with Rust's shortest-roundtrip float display,
//! so identical runs produce identical bytes.

use jdbayes_core::assumptions::{validate_assumptions, ProbeGrid};
use jdbayes_core::model::ModelSpec;

use crate::config::ExperimentConfig;
use crate::runner::RepOutcome;

pub const RESULTS_HEADER: &str = "cell_id,n,epsilon,lambda,rep,mu0_hat,sigma_hat,mu_hat,\
alpha1_hat,alpha2_hat,njumps_detected,filter_diag,acc_rate_stage0,acc_rate_stage1,\
acc_rate_stage2,acc_rate_stage3,warn_code";

pub const SUMMARY_HEADER: &str = "estimator,n,epsilon,mean,sd,count,mean_acc_rate,warn_count";

const ESTIMATORS: [&str; 5] = ["mu0", "sigma", "mu", "alpha1", "alpha2"];

fn opt(v: Option<f64>) -> String {
    match v {
        Some(x) => x.to_string(),
        None => "NA".into(),
    }
}

/// One line per replication, in the order given (the runner sorts by
/// (cell, rep)).
pub fn results_csv(rows: &[RepOutcome]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for row in rows {
        let (est_cols, njumps, diag, accs) = match &row.result {
            Ok(est) => (
                [
                    opt(est.mu0_hat.first().copied()),
                    opt(est.sigma_hat.first().copied()),
                    opt(est.mu_hat.first().copied()),
                    opt(est.alpha_hat.first().copied()),
                    opt(est.alpha_hat.get(1).copied()),
                ],
                est.njumps_detected.to_string(),
                opt(est.filter_diag),
                est.stages
                    .iter()
                    .map(|s| opt(s.as_ref().map(|d| d.acceptance_rate)))
                    .collect::<Vec<_>>(),
            ),
            Err(_) => (
                std::array::from_fn(|_| "NA".to_string()),
                "NA".into(),
                "NA".into(),
                vec!["NA".into(); 4],
            ),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.cell_id,
            row.n,
            row.epsilon,
            row.lambda,
            row.rep,
            est_cols.join(","),
            njumps,
            diag,
            accs[0],
            accs[1],
            accs[2],
            accs[3],
            row.warn_code(),
        ));
    }
    out
}

/// One summary line per (estimator, cell).
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub estimator: &'static str,
    pub n: usize,
    pub epsilon: f64,
    pub mean: Option<f64>,
    /// Unbiased sample standard deviation; `None` below two successful
    /// replications.
    pub sd: Option<f64>,
    /// Successful replications contributing to mean/sd.
    pub count: usize,
    pub mean_acc_rate: Option<f64>,
    /// Rows with any warning bit or an outright failure.
    pub warn_count: usize,
}

fn mean_sd(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (Some(mean), None);
    }
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (Some(mean), Some((ss / (n - 1.0)).sqrt()))
}

/// Aggregates sorted rows into the summary table. Cells with no
/// successful replication are omitted; each omission is reported in the
/// returned warning list.
pub fn summarize(rows: &[RepOutcome]) -> (Vec<SummaryRow>, Vec<String>) {
    let mut cells: Vec<usize> = Vec::new();
    for row in rows {
        if !cells.contains(&row.cell_index) {
            cells.push(row.cell_index);
        }
    }
    let mut table = Vec::new();
    let mut warnings = Vec::new();
    for cell in cells {
        let cell_rows: Vec<&RepOutcome> = rows.iter().filter(|r| r.cell_index == cell).collect();
        let ok: Vec<&jdbayes_core::pipeline::EstimationResult> =
            cell_rows.iter().filter_map(|r| r.result.as_ref().ok()).collect();
        let warn_count = cell_rows.iter().filter(|r| r.warn_code() != 0).count();
        let (n, epsilon, cell_id) =
            (cell_rows[0].n, cell_rows[0].epsilon, cell_rows[0].cell_id.clone());
        if ok.is_empty() {
            warnings.push(format!(
                "cell {cell_id}: all {} replications failed; omitted from the summary",
                cell_rows.len()
            ));
            continue;
        }
        for (i, estimator) in ESTIMATORS.iter().enumerate() {
            let pick = |est: &jdbayes_core::pipeline::EstimationResult| -> Option<f64> {
                match i {
                    0 => est.mu0_hat.first().copied(),
                    1 => est.sigma_hat.first().copied(),
                    2 => est.mu_hat.first().copied(),
                    3 => est.alpha_hat.first().copied(),
                    _ => est.alpha_hat.get(1).copied(),
                }
            };
            let stage = [0, 1, 2, 3, 3][i];
            let values: Vec<f64> = ok.iter().filter_map(|e| pick(e)).collect();
            let accs: Vec<f64> = ok
                .iter()
                .filter_map(|e| e.stages[stage].as_ref().map(|d| d.acceptance_rate))
                .collect();
            let (mean, sd) = mean_sd(&values);
            let mean_acc_rate = if accs.is_empty() {
                None
            } else {
                Some(accs.iter().sum::<f64>() / accs.len() as f64)
            };
            table.push(SummaryRow {
                estimator,
                n,
                epsilon,
                mean,
                sd,
                count: values.len(),
                mean_acc_rate,
                warn_count,
            });
        }
    }
    (table, warnings)
}

pub fn summary_csv(table: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for row in table {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.estimator,
            row.n,
            row.epsilon,
            opt(row.mean),
            opt(row.sd),
            row.count,
            opt(row.mean_acc_rate),
            row.warn_count,
        ));
    }
    out
}

/// The assumption report, one section per grid cell (the filter
/// constraint depends on the cell's n).
pub fn assumptions_text(cfg: &ExperimentConfig, model: &ModelSpec) -> String {
    let mut out = String::new();
    for cell in &cfg.grid {
        let grid = ProbeGrid::new(cfg.x0).with_filter(cfg.filter.clone(), cell.n);
        let report = validate_assumptions(model, &cfg.theta0, &grid);
        out.push_str(&format!("== grid cell n = {}, epsilon = {} ==\n", cell.n, cell.epsilon));
        out.push_str(&report.render());
        out.push('\n');
    }
    out
}

/// Fixed-width rendering of the summary for the terminal.
pub fn summary_text(table: &[SummaryRow]) -> String {
    let mut out = format!(
        "{:<9} {:>6} {:>8} {:>12} {:>12} {:>6} {:>9} {:>6}\n",
        "estimator", "n", "epsilon", "mean", "sd", "count", "acc_rate", "warns"
    );
    let four = |v: Option<f64>| match v {
        Some(x) => format!("{x:.5}"),
        None => "NA".into(),
    };
    for row in table {
        out.push_str(&format!(
            "{:<9} {:>6} {:>8} {:>12} {:>12} {:>6} {:>9} {:>6}\n",
            row.estimator,
            row.n,
            row.epsilon,
            four(row.mean),
            four(row.sd),
            row.count,
            match row.mean_acc_rate {
                Some(a) => format!("{a:.3}"),
                None => "NA".into(),
            },
            row.warn_count,
        ));
    }
    out
}
