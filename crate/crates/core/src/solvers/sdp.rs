//! Goemans–Williamson max-cut.
//!
//! The relaxation minimizes `tr(WΣ)` over PSD `Σ` with unit diagonal. It is
//! solved in factored form `Σ = VVᵀ` with `V` of rank `⌈√(2n)⌉` by exact
//! block-coordinate steps on the rows of `V`: with the other rows fixed, the
//! best unit row `v_i` is `−g_i/‖g_i‖` where `g_i = Σ_j w_ij v_j`. At a
//! stationary point `y_i = ⟨v_i, g_i⟩` is a dual candidate; the smallest
//! eigenvalue of `W − diag(y)` certifies optimality (or supplies an escape
//! direction when the factorization is stuck at a saddle).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{cut_weight, Partition, WeightGraph};
use crate::rng::{derive_seed, rng_from_seed, substream};

/// Above this size the dense relaxation is not attempted.
pub const GW_MAX_VERTICES: usize = 1000;

#[derive(Clone, Debug)]
pub struct GwOptions {
    pub rounding_trials: usize,
    pub seed: u64,
    /// Cap on coordinate sweeps, summed over saddle escapes.
    pub max_sweeps: usize,
    /// Relative change in `tr(WΣ)` per sweep treated as converged.
    pub tol: f64,
    /// Factor rank; `None` uses `⌈√(2n)⌉`.
    pub rank: Option<usize>,
}

impl Default for GwOptions {
    fn default() -> Self {
        GwOptions { rounding_trials: 100, seed: 0, max_sweeps: 200_000, tol: 1e-10, rank: None }
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    /// `Σ = VVᵀ`: PSD with unit diagonal.
    pub gram: DMatrix<f64>,
    /// The factor `V` (`n × rank`).
    pub factor: DMatrix<f64>,
    pub cut: Partition,
    pub cut_value: f64,
    /// `tr(WΣ)` at the returned factor.
    pub trace_objective: f64,
    /// Cut value of the relaxation at the returned factor.
    pub relaxation_value: f64,
    /// Certified upper bound on the relaxation optimum (dual bound).
    pub upper_bound: f64,
    /// `cut_value / upper_bound`; the guarantee is ≥ 0.878 in expectation.
    pub ratio_to_bound: f64,
    pub sweeps: usize,
    /// Best cut of each rounding trial.
    pub trial_values: Vec<f64>,
}

/// [`maxcut_gw_with`] with the default options.
pub fn maxcut_gw(w: &WeightGraph, rounding_trials: usize, seed: u64) -> Result<SdpSolution> {
    maxcut_gw_with(w, &GwOptions { rounding_trials, seed, ..GwOptions::default() })
}

pub fn maxcut_gw_with(w: &WeightGraph, opts: &GwOptions) -> Result<SdpSolution> {
    let n = w.n();
    if n < 2 {
        return Err(Error::InvalidInput(format!("max-cut needs at least 2 vertices, got {n}")));
    }
    if n > GW_MAX_VERTICES {
        return Err(Error::InvalidConfig(format!(
            "Goemans-Williamson is limited to {GW_MAX_VERTICES} vertices, got {n}"
        )));
    }
    if opts.rounding_trials == 0 {
        return Err(Error::InvalidConfig("need at least one rounding trial".into()));
    }
    let rank = opts.rank.unwrap_or_else(|| ((2 * n) as f64).sqrt().ceil() as usize).max(2);
    let wm = DMatrix::from_row_slice(n, n, w.as_slice());
    let scale = 1.0 + w.total_weight();

    let mut rng = rng_from_seed(derive_seed(opts.seed, 0x5d9));
    let mut v = DMatrix::from_fn(n, rank, |_, _| StandardNormal.sample(&mut rng));
    for mut row in v.row_iter_mut() {
        let norm = row.norm();
        row /= norm;
    }

    let mut sweeps = 0;
    let mut lambda_min;
    let mut escapes = 0;
    loop {
        let converged = coordinate_sweeps(&wm, &mut v, opts.tol * scale, opts.max_sweeps, &mut sweeps);
        if !converged {
            return Err(Error::SolverFailure(format!(
                "relaxation did not converge within {} sweeps",
                opts.max_sweeps
            )));
        }
        let (lmin, direction) = dual_check(&wm, &v);
        lambda_min = lmin;
        if lmin >= -1e-9 * scale || escapes >= 8 {
            break;
        }
        // Saddle: step along the negative-curvature direction in a new column.
        escapes += 1;
        let mut grown = v.clone().insert_column(v.ncols(), 0.0);
        let last = grown.ncols() - 1;
        for i in 0..n {
            grown[(i, last)] = 0.5 * direction[i] * (n as f64).sqrt();
        }
        for mut row in grown.row_iter_mut() {
            let norm = row.norm();
            row /= norm;
        }
        v = grown;
    }

    let gram = &v * v.transpose();
    let trace_objective = (&wm.component_mul(&gram)).sum();
    let total = w.total_weight();
    let relaxation_value = total / 2.0 - trace_objective / 4.0;
    let y_sum: f64 = (0..n).map(|i| (wm.row(i) * &v).dot(&v.row(i))).sum();
    let dual_lower = y_sum + n as f64 * lambda_min.min(0.0);
    let upper_bound = total / 2.0 - dual_lower / 4.0;

    let trials: Vec<(Vec<usize>, f64)> = (0..opts.rounding_trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(derive_seed(opts.seed, 0x90f), t as u64);
            let r = DVector::from_fn(v.ncols(), |_, _| StandardNormal.sample(&mut rng));
            let side = &v * r;
            let labels: Vec<usize> = side.iter().map(|&s| usize::from(s < 0.0)).collect();
            let value = cut_weight(w, &Partition::new(labels.clone(), 2).expect("labels in range"))
                .expect("sizes match");
            (labels, value)
        })
        .collect();
    let mut best = 0;
    for (t, trial) in trials.iter().enumerate() {
        if trial.1 > trials[best].1 {
            best = t;
        }
    }
    let trial_values: Vec<f64> = trials.iter().map(|t| t.1).collect();
    let (labels, cut_value) = trials.into_iter().nth(best).expect("at least one trial");
    let ratio_to_bound = if upper_bound > 0.0 { cut_value / upper_bound } else { 1.0 };
    if ratio_to_bound < 0.87 {
        log::debug!("rounded cut at {ratio_to_bound:.4} of the relaxation bound");
    }

    Ok(SdpSolution {
        gram,
        factor: v,
        cut: Partition::new(labels, 2)?,
        cut_value,
        trace_objective,
        relaxation_value,
        upper_bound,
        ratio_to_bound,
        sweeps,
        trial_values,
    })
}

/// Row-wise exact minimization until the objective stalls. Returns whether
/// the tolerance was met before the sweep budget ran out.
fn coordinate_sweeps(w: &DMatrix<f64>, v: &mut DMatrix<f64>, tol: f64, max_sweeps: usize, sweeps: &mut usize) -> bool {
    let n = w.nrows();
    let p = v.ncols();
    // row-major copies so that row updates touch contiguous memory
    let wr: Vec<f64> = w.transpose().as_slice().to_vec();
    let mut vr: Vec<f64> = v.transpose().as_slice().to_vec();
    // g = W V, maintained under single-row updates
    let mut g: Vec<f64> = (w * &*v).transpose().as_slice().to_vec();
    let objective_of = |g: &[f64], vr: &[f64]| g.iter().zip(vr).map(|(a, b)| a * b).sum::<f64>();
    let mut objective = objective_of(&g, &vr);
    let mut delta = vec![0.0; p];
    let mut converged = false;
    while *sweeps < max_sweeps {
        *sweeps += 1;
        for i in 0..n {
            let gi = &g[i * p..(i + 1) * p];
            let norm = gi.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let mut moved = false;
            for c in 0..p {
                let new = -gi[c] / norm;
                delta[c] = new - vr[i * p + c];
                moved |= delta[c] != 0.0;
                vr[i * p + c] = new;
            }
            if !moved {
                continue;
            }
            let wi = &wr[i * n..(i + 1) * n];
            for (j, &wji) in wi.iter().enumerate() {
                if wji != 0.0 {
                    for (gc, dc) in g[j * p..(j + 1) * p].iter_mut().zip(&delta) {
                        *gc += wji * dc;
                    }
                }
            }
        }
        let next = objective_of(&g, &vr);
        let change = objective - next;
        objective = next;
        if change.abs() <= tol {
            converged = true;
            break;
        }
    }
    *v = DMatrix::from_row_slice(n, p, &vr);
    converged
}

/// Smallest eigenvalue of `W − diag(y)` with `y_i = ⟨v_i, (WV)_i⟩`, and its
/// eigenvector.
fn dual_check(w: &DMatrix<f64>, v: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let n = w.nrows();
    let g = w * v;
    let mut s = w.clone();
    for i in 0..n {
        s[(i, i)] -= g.row(i).dot(&v.row(i));
    }
    let eig = SymmetricEigen::new(s);
    let (idx, &lmin) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty spectrum");
    (lmin, eig.eigenvectors.column(idx).into_owned())
}
