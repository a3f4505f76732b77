use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fraction_correct_lines, simulate_dataset, SimSpec};
use crate::error::Result;
use crate::pipeline::{precision, run_pipeline, PipelineConfig, PrecisionReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub spec: SimSpec,
    pub precision: PrecisionReport,
    pub estimated_sizes: Vec<usize>,
    pub f_trace: Vec<f64>,
    pub pct_correct_lines: f64,
    pub converged: bool,
}

/// One simulation and pipeline run per spec, in spec order.
pub fn run_noise_sweep(specs: &[SimSpec], cfg: &PipelineConfig) -> Result<Vec<SweepRow>> {
    specs
        .par_iter()
        .map(|spec| {
            let data = simulate_dataset(spec)?;
            let outcome = run_pipeline(&data.table, cfg)?;
            let report = precision(&outcome.state.partition, &data.truth_partition)?;
            Ok(SweepRow {
                spec: spec.clone(),
                estimated_sizes: outcome.state.partition.class_sizes(),
                f_trace: outcome.objective_history(),
                pct_correct_lines: 100.0
                    * fraction_correct_lines(&data.table, &data.truth_rotations, &data.truth_partition),
                converged: outcome.converged,
                precision: report,
            })
        })
        .collect()
}

/// Header of the per-class result table for `k` classes.
pub fn class_table_header(k: usize) -> Vec<String> {
    let mut cols = vec!["class_id".to_string()];
    cols.extend((1..=k).map(|l| format!("correct_in_class_{l}")));
    cols.extend(["class_size", "precision", "pct_correct_lines"].map(String::from));
    cols
}

/// Rows of the per-class table. Row `l` is the estimated class matched to
/// true class `l`; `precision` is the partition's minimum precision.
pub fn class_table_rows(report: &PrecisionReport, pct_correct_lines: f64) -> Vec<Vec<String>> {
    let k = report.matching.len();
    (0..k)
        .map(|l| {
            let e = report.estimated_for_true(l);
            let mut row = vec![(l + 1).to_string()];
            row.extend(report.confusion[e].iter().map(|c| c.to_string()));
            row.push(report.confusion[e].iter().sum::<usize>().to_string());
            row.push(format!("{:.4}", report.min_precision));
            row.push(format!("{pct_correct_lines:.2}"));
            row
        })
        .collect()
}

/// Per-class table for every sweep row, prefixed by the row's noise settings.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let k = rows.iter().map(|r| r.precision.matching.len()).max().unwrap_or(2);
    let mut header: Vec<String> = ["run", "p_correct", "eps_line", "seed"].map(String::from).to_vec();
    header.extend(class_table_header(k));
    w.write_record(&header).map_err(csv_error)?;
    for (run, row) in rows.iter().enumerate() {
        for cells in class_table_rows(&row.precision, row.pct_correct_lines) {
            let mut record = vec![
                run.to_string(),
                row.spec.p_correct.to_string(),
                row.spec.eps_line.to_string(),
                row.spec.seed.to_string(),
            ];
            record.extend(cells);
            w.write_record(&record).map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_error(e: csv::Error) -> crate::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => crate::Error::Io(io),
        other => crate::Error::InvalidInput(format!("csv: {other:?}")),
    }
}
