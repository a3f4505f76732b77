//! Alternating minimization of the joint objective
//! `F(R, G) = Σ_k Σ_{i<j ∈ G_k} ‖R_i ĉ_ij − R_j ĉ_ji‖`.
//!
//! Each iteration estimates rotations class by class with LUD, builds the
//! weight graph from those rotations, and repartitions by max-K-cut. Both
//! steps are guarded: a step that would increase `F` is reverted, so the
//! recorded objective is non-increasing.

mod precision;

pub use precision::{hungarian_max, matching_exhaustive, precision, PrecisionReport};

use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CommonLineTable, Rotation};
use crate::graph::{build_weight_graph, class_objective, within_class_weight, Partition, WeightGraph};
use crate::rng::{derive_seed, rng_from_seed};
use crate::solvers::{maxcut_gw_with, maxkcut_local, GwOptions};
use crate::sync::{lud_rotations_with, LudOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxCutSolver {
    /// SDP relaxation with hyperplane rounding. Two classes only.
    Gw,
    /// Multi-start single-vertex local search.
    Local,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initialization {
    AllInOne,
    RandomBalanced,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub k: usize,
    pub max_iters: usize,
    pub solver: MaxCutSolver,
    pub local_starts: usize,
    pub gw_rounding_trials: usize,
    pub lud_max_iters: usize,
    pub lud_tol: f64,
    /// Stop once consecutive objective values differ by at most this.
    pub stop_tol: f64,
    pub init: Initialization,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            k: 2,
            max_iters: 8,
            solver: MaxCutSolver::Gw,
            local_starts: 8,
            gw_rounding_trials: 100,
            lud_max_iters: 100,
            lud_tol: 1e-8,
            stop_tol: 1e-9,
            init: Initialization::AllInOne,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if self.solver == MaxCutSolver::Gw && self.k > 2 {
            return Err(Error::InvalidConfig(format!("the gw solver handles k = 2 only, got k = {}", self.k)));
        }
        if self.solver == MaxCutSolver::Local && self.local_starts == 0 {
            return Err(Error::InvalidConfig("local_starts must be at least 1".into()));
        }
        if n < 2 * self.k {
            log::warn!("{n} images for {} classes; some classes will be too small to orient", self.k);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineState {
    pub rotations: Vec<Rotation>,
    pub partition: Partition,
    pub f: f64,
    pub iter: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    /// Objective after the rotation step, on the previous partition.
    pub f_after_sync: f64,
    /// Objective after the partition step.
    pub f: f64,
    pub class_sizes: Vec<usize>,
    /// Classes whose new rotations were rejected for increasing `F`.
    pub sync_reverted: Vec<usize>,
    /// Classes left with their previous rotations (too small or disconnected).
    pub sync_skipped: Vec<usize>,
    pub cut_reverted: bool,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub state: PipelineState,
    /// State after every iteration.
    pub trace: Vec<PipelineState>,
    pub records: Vec<IterationRecord>,
    pub converged: bool,
}

impl PipelineOutcome {
    pub fn objective_history(&self) -> Vec<f64> {
        self.trace.iter().map(|s| s.f).collect()
    }
}

pub fn initial_partition(n: usize, cfg: &PipelineConfig) -> Partition {
    match cfg.init {
        Initialization::AllInOne => Partition::single_class(n, cfg.k),
        Initialization::RandomBalanced => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng_from_seed(derive_seed(cfg.seed, 0x1417)));
            let mut labels = vec![0; n];
            for (pos, &i) in order.iter().enumerate() {
                labels[i] = pos % cfg.k;
            }
            Partition::new(labels, cfg.k).expect("labels below k")
        }
    }
}

/// Per-class rotation estimates. Returns indices of classes whose estimate was
/// rejected and classes that were skipped.
fn sync_step(
    table: &CommonLineTable,
    partition: &Partition,
    rotations: &mut [Rotation],
    guard: bool,
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut reverted = Vec::new();
    let mut skipped = Vec::new();
    let opts = LudOptions { max_iters: cfg.lud_max_iters, tol: cfg.lud_tol, seed, ..LudOptions::default() };
    for class in 0..partition.k() {
        let members = partition.members(class);
        if members.is_empty() {
            continue;
        }
        let sub = table.restrict(&members)?;
        let sol = match lud_rotations_with(&sub, &opts) {
            Ok(sol) => sol,
            Err(Error::TooFewImages(_) | Error::DisconnectedPairs { .. }) => {
                skipped.push(class);
                continue;
            }
            Err(e) => return Err(e),
        };
        let previous: Vec<Rotation> = members.iter().map(|&i| rotations[i]).collect();
        let old = class_objective(rotations, table, &members);
        for (&i, r) in members.iter().zip(&sol.rotations) {
            rotations[i] = *r;
        }
        if guard && class_objective(rotations, table, &members) > old {
            for (&i, r) in members.iter().zip(&previous) {
                rotations[i] = *r;
            }
            reverted.push(class);
        }
    }
    Ok((reverted, skipped))
}

/// Max-K-cut of `w` with the configured solver.
pub fn solve_maxcut(w: &WeightGraph, cfg: &PipelineConfig, seed: u64) -> Result<Partition> {
    if cfg.k == 1 {
        return Ok(Partition::single_class(w.n(), 1));
    }
    match cfg.solver {
        MaxCutSolver::Gw => {
            let opts = GwOptions { rounding_trials: cfg.gw_rounding_trials, seed, ..GwOptions::default() };
            Ok(maxcut_gw_with(w, &opts)?.cut)
        }
        MaxCutSolver::Local => maxkcut_local(w, cfg.k, cfg.local_starts, seed),
    }
}

/// Partition step alone: weight graph from given rotations, then max-K-cut.
pub fn partition_with_rotations(
    table: &CommonLineTable,
    rotations: &[Rotation],
    cfg: &PipelineConfig,
) -> Result<(Partition, f64)> {
    let w = build_weight_graph(rotations, table)?;
    let p = solve_maxcut(&w, cfg, derive_seed(cfg.seed, 0xc07))?;
    let f = within_class_weight(&w, &p)?;
    Ok((p, f))
}

pub fn run_pipeline(table: &CommonLineTable, cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    let n = table.n();
    table.validate()?;
    cfg.validate(n)?;
    let mut partition = initial_partition(n, cfg);
    let mut rotations = vec![Rotation::identity(); n];
    let mut trace: Vec<PipelineState> = Vec::new();
    let mut records = Vec::new();
    let mut converged = false;

    for iter in 1..=cfg.max_iters {
        let started = Instant::now();
        let iter_seed = derive_seed(cfg.seed, iter as u64);
        let (sync_reverted, sync_skipped) =
            sync_step(table, &partition, &mut rotations, iter > 1, cfg, derive_seed(iter_seed, 1))?;
        let w = build_weight_graph(&rotations, table)?;
        let f_after_sync = within_class_weight(&w, &partition)?;

        let mut f = f_after_sync;
        let mut cut_reverted = false;
        if cfg.k > 1 {
            let candidate = solve_maxcut(&w, cfg, derive_seed(iter_seed, 2))?;
            let f_candidate = within_class_weight(&w, &candidate)?;
            if f_candidate > f_after_sync {
                cut_reverted = true;
            } else {
                partition = candidate;
                f = f_candidate;
            }
        }

        let previous_f = trace.last().map(|s| s.f);
        records.push(IterationRecord {
            iter,
            f_after_sync,
            f,
            class_sizes: partition.class_sizes(),
            sync_reverted,
            sync_skipped,
            cut_reverted,
            wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        });
        trace.push(PipelineState { rotations: rotations.clone(), partition: partition.clone(), f, iter });
        log::debug!("iteration {iter}: F = {f}");

        if cfg.k == 1 {
            converged = true;
            break;
        }
        if let Some(prev) = previous_f {
            if (f - prev).abs() <= cfg.stop_tol {
                converged = true;
                break;
            }
        }
    }

    let state = trace.last().cloned().expect("at least one iteration");
    Ok(PipelineOutcome { state, trace, records, converged })
}
