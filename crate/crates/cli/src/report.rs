use anyhow::Result;
use heterocut::pipeline::{precision, IterationRecord, PipelineConfig, PipelineOutcome, PrecisionReport};
use heterocut::sim::{class_table_header, class_table_rows, fraction_correct_lines, StoredDataset};
use serde::Serialize;

#[derive(Serialize)]
pub struct PartitionReport {
    n: usize,
    config: PipelineConfig,
    converged: bool,
    iterations: Vec<IterationRecord>,
    #[serde(rename = "final")]
    final_state: FinalState,
    precision: Option<PrecisionReport>,
    pct_correct_lines: Option<f64>,
}

#[derive(Serialize)]
struct FinalState {
    f: f64,
    iter: usize,
    class_sizes: Vec<usize>,
    /// 1-based class of every image.
    labels: Vec<usize>,
}

impl PartitionReport {
    pub fn new(data: &StoredDataset, cfg: &PipelineConfig, outcome: &PipelineOutcome, timings: bool) -> Result<Self> {
        let state = &outcome.state;
        let mut iterations = outcome.records.clone();
        if !timings {
            for r in &mut iterations {
                r.wall_time_ms = 0.0;
            }
        }
        let (precision, pct_correct_lines) = match &data.truth {
            Some((rotations, truth)) => (
                Some(precision(&state.partition, truth)?),
                Some(100.0 * fraction_correct_lines(&data.table, rotations, truth)),
            ),
            None => (None, None),
        };
        Ok(PartitionReport {
            n: data.table.n(),
            config: cfg.clone(),
            converged: outcome.converged,
            iterations,
            final_state: FinalState {
                f: state.f,
                iter: state.iter,
                class_sizes: state.partition.class_sizes(),
                labels: state.partition.labels().iter().map(|l| l + 1).collect(),
            },
            precision,
            pct_correct_lines,
        })
    }

    /// The per-class CSV table, when ground truth is known.
    pub fn class_table(&self) -> Option<String> {
        let report = self.precision.as_ref()?;
        let mut out = class_table_header(report.matching.len()).join(",");
        out.push('\n');
        for row in class_table_rows(report, self.pct_correct_lines?) {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        Some(out)
    }
}
