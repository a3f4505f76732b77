//! Least-unsquared-deviation rotation estimation from common lines.
//!
//! Minimizes `Σ_{i<j} ‖R_i ĉ_ij − R_j ĉ_ji‖` over valid pairs. Only the first
//! two columns of each rotation enter the objective, so the unknowns are
//! orthonormal 3×2 frames `A_i` and `R_i = [a₁ a₂ a₁×a₂]`.
//!
//! Initialization is spectral: the 2n×2n matrix with blocks `c_ij c_jiᵀ` has
//! (for consistent lines and well-spread views) its top three eigenvectors
//! spanning the rows of the stacked frames, and each 2×3 block is rounded to
//! the nearest orthonormal frame.
//!
//! Refinement is iteratively reweighted least squares applied one image at a
//! time: with weights `1/max(r_ij, δ)` from the current residuals, the
//! weighted least-squares problem in `A_i` alone is an orthogonal Procrustes
//! problem solved exactly by the polar factor of `Σ_j w_ij u_j c_ijᵀ`, where
//! `u_j = R_j ĉ_ji`. Since `r ≤ r²/(2m) + m/2` with equality at `r = m`, each
//! such step is a majorize-minimize step for the unsquared objective.

use nalgebra::{DMatrix, Matrix3, Matrix3x2, SymmetricEigen, Vector2, Vector3};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::geometry::{CommonLineTable, Rotation};
use crate::graph::class_objective;
use crate::rng::rng_from_seed;

/// Floor on residuals when forming weights.
pub const IRLS_DELTA: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct LudOptions {
    pub max_iters: usize,
    /// Stop once the relative objective decrease of a sweep falls below this.
    pub tol: f64,
    pub delta: f64,
    pub seed: u64,
}

impl Default for LudOptions {
    fn default() -> Self {
        LudOptions { max_iters: 100, tol: 1e-8, delta: IRLS_DELTA, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct SyncResult {
    pub rotations: Vec<Rotation>,
    /// Final objective `Σ_{valid i<j} ‖R_i ĉ_ij − R_j ĉ_ji‖`.
    pub residual: f64,
    /// Refinement sweeps performed.
    pub iterations: usize,
    /// Objective after initialization and after every sweep.
    pub history: Vec<f64>,
}

/// The unsquared objective, summed over valid pairs in lexicographic order.
pub fn lud_objective(rotations: &[Rotation], table: &CommonLineTable) -> f64 {
    let members: Vec<usize> = (0..table.n()).collect();
    class_objective(rotations, table, &members)
}

/// [`lud_rotations_with`] with explicit iteration cap, tolerance and seed.
pub fn lud_rotations(table: &CommonLineTable, max_iters: usize, tol: f64, seed: u64) -> Result<SyncResult> {
    lud_rotations_with(table, &LudOptions { max_iters, tol, seed, ..LudOptions::default() })
}

pub fn lud_rotations_with(table: &CommonLineTable, opts: &LudOptions) -> Result<SyncResult> {
    check_solvable(table)?;
    let init = spectral_rotations(table)?;
    refine(table, init, opts)
}

fn check_solvable(table: &CommonLineTable) -> Result<()> {
    let n = table.n();
    if n < 3 {
        return Err(Error::TooFewImages(n));
    }
    let (components, _) = table.components();
    if components > 1 {
        return Err(Error::DisconnectedPairs { components });
    }
    Ok(())
}

/// Spectral estimate: top eigenvectors of the common-line matrix, rounded
/// block by block. Determined up to a global element of O(3).
pub fn spectral_rotations(table: &CommonLineTable) -> Result<Vec<Rotation>> {
    check_solvable(table)?;
    let n = table.n();
    let mut s = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in i + 1..n {
            if let Some((cij, cji)) = table.pair(i, j) {
                let block = cij.vector() * cji.vector().transpose();
                for a in 0..2 {
                    for b in 0..2 {
                        s[(2 * i + a, 2 * j + b)] = block[(a, b)];
                        s[(2 * j + b, 2 * i + a)] = block[(a, b)];
                    }
                }
            }
        }
    }
    let eig = SymmetricEigen::new(s);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let top = &order[..3];

    let mut rng = rng_from_seed(0x5bec_7a11);
    let rotations = (0..n)
        .map(|i| {
            let mut frame_t = Matrix3x2::zeros();
            for (col, &e) in top.iter().enumerate() {
                frame_t[(col, 0)] = eig.eigenvectors[(2 * i, e)];
                frame_t[(col, 1)] = eig.eigenvectors[(2 * i + 1, e)];
            }
            frame_to_rotation(&polar_frame(&frame_t).unwrap_or_else(|| random_frame(&mut rng)))
        })
        .collect();
    Ok(rotations)
}

/// Nearest 3×2 matrix with orthonormal columns, or `None` for a rank-deficient input.
fn polar_frame(b: &Matrix3x2<f64>) -> Option<Matrix3x2<f64>> {
    let svd = b.svd(true, true);
    if svd.singular_values.min() <= 1e-14 * svd.singular_values.max().max(1e-300) {
        return None;
    }
    Some(svd.u? * svd.v_t?)
}

fn random_frame(rng: &mut crate::rng::Rng) -> Matrix3x2<f64> {
    let r = crate::geometry::sample_uniform_rotation(rng);
    r.matrix().fixed_columns::<2>(0).into_owned()
}

fn frame_to_rotation(frame: &Matrix3x2<f64>) -> Rotation {
    let a1: Vector3<f64> = frame.column(0).into_owned();
    let a2: Vector3<f64> = frame.column(1).into_owned();
    let m = Matrix3::from_columns(&[a1, a2, a1.cross(&a2)]);
    // polar factors are orthonormal to rounding; reproject to keep the
    // invariant tight after many updates
    Rotation::project(&m)
}

/// Valid neighbours of every image with the lines as seen from each side.
struct Adjacency {
    neighbours: Vec<Vec<(usize, Vector2<f64>, Vector2<f64>)>>,
}

impl Adjacency {
    fn new(table: &CommonLineTable) -> Self {
        let n = table.n();
        let neighbours = (0..n)
            .map(|i| {
                (0..n)
                    .filter_map(|j| table.pair(i, j).map(|(cij, cji)| (j, *cij.vector(), *cji.vector())))
                    .collect()
            })
            .collect();
        Adjacency { neighbours }
    }
}

fn apply(r: &Rotation, c: &Vector2<f64>) -> Vector3<f64> {
    let m = r.matrix();
    m.column(0) * c.x + m.column(1) * c.y
}

/// Sum of residuals of image `i` against all its neighbours when `i` has frame `frame`.
fn local_objective(
    frame: &Matrix3x2<f64>,
    adj: &[(usize, Vector2<f64>, Vector2<f64>)],
    rotations: &[Rotation],
) -> f64 {
    adj.iter().map(|(j, cij, cji)| (frame * cij - apply(&rotations[*j], cji)).norm()).sum()
}

/// IRLS refinement from `init`. The objective history is non-increasing.
pub fn refine(table: &CommonLineTable, init: Vec<Rotation>, opts: &LudOptions) -> Result<SyncResult> {
    let n = table.n();
    if init.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: init.len() });
    }
    let adj = Adjacency::new(table);
    let mut rng = rng_from_seed(opts.seed);
    let mut rotations = init;
    let mut current = lud_objective(&rotations, table);
    let mut history = vec![current];
    let floor = 1e-13 * table.valid_pair_count().max(1) as f64;
    let mut iterations = 0;

    while iterations < opts.max_iters && current > floor {
        iterations += 1;
        let before = rotations.clone();
        for i in 0..n {
            let nbrs = &adj.neighbours[i];
            if nbrs.is_empty() {
                continue;
            }
            let old_frame: Matrix3x2<f64> = rotations[i].matrix().fixed_columns::<2>(0).into_owned();
            let mut b = Matrix3x2::zeros();
            let mut old_local = 0.0;
            for (j, cij, cji) in nbrs {
                let u = apply(&rotations[*j], cji);
                let r = (old_frame * cij - u).norm();
                old_local += r;
                b += (u * cij.transpose()) / r.max(opts.delta);
            }
            let frame = match polar_frame(&b) {
                Some(f) => f,
                None => {
                    // all neighbours cancel; perturb to break the tie
                    let jitter = Matrix3x2::from_fn(|_, _| 1e-9 * (rng.random::<f64>() - 0.5));
                    match polar_frame(&(b + jitter)) {
                        Some(f) => f,
                        None => continue,
                    }
                }
            };
            let candidate = frame_to_rotation(&frame);
            let cand_frame: Matrix3x2<f64> = candidate.matrix().fixed_columns::<2>(0).into_owned();
            if local_objective(&cand_frame, nbrs, &rotations) < old_local {
                rotations[i] = candidate;
            }
        }
        let next = lud_objective(&rotations, table);
        if next > current {
            // rounding in the block guards; keep the previous iterate
            rotations = before;
            break;
        }
        let decrease = current - next;
        current = next;
        history.push(current);
        if decrease <= opts.tol * current.max(f64::MIN_POSITIVE) {
            break;
        }
    }

    Ok(SyncResult { rotations, residual: current, iterations, history })
}
