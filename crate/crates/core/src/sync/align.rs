//! Global gauge alignment of estimated rotations against ground truth.
//!
//! Common lines fix rotations only up to `R_i ↦ Q R_i` and the handedness
//! flip `R_i ↦ Q R_i J` with `J = diag(1, 1, −1)` and `det Q = −1`. Both
//! branches are solved as orthogonal Procrustes problems over the stacked
//! matrices and the better one is kept.

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::geometry::{rotation_distance, Rotation};

#[derive(Clone, Debug)]
pub struct Alignment {
    pub aligned: Vec<Rotation>,
    /// Mean spectral-norm error after alignment.
    pub mean_error: f64,
    pub max_error: f64,
    /// The global transform `Q` (orthogonal, determinant ±1).
    pub transform: Matrix3<f64>,
    /// Whether the handedness-flipped branch was chosen.
    pub reflected: bool,
}

pub fn align_rotations(estimated: &[Rotation], truth: &[Rotation]) -> Result<Alignment> {
    if estimated.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: estimated.len() });
    }
    if estimated.is_empty() {
        return Err(Error::InvalidInput("nothing to align".into()));
    }
    let flip = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, -1.0));
    let mut best: Option<(f64, Matrix3<f64>, bool)> = None;
    for reflected in [false, true] {
        let sign = if reflected { -1.0 } else { 1.0 };
        let mut m = Matrix3::zeros();
        for (e, t) in estimated.iter().zip(truth) {
            let te = if reflected { e.matrix() * flip } else { *e.matrix() };
            m += t.matrix() * te.transpose();
        }
        let svd = m.svd(true, true);
        let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
        let mut d = Matrix3::identity();
        d[(2, 2)] = sign * (u * v_t).determinant().signum();
        let q = u * d * v_t;
        let score = (q.transpose() * m).trace();
        if best.as_ref().is_none_or(|b| score > b.0) {
            best = Some((score, q, reflected));
        }
    }
    let (_, q, reflected) = best.expect("two branches evaluated");
    let aligned: Vec<Rotation> = estimated
        .iter()
        .map(|e| {
            let te = if reflected { e.matrix() * flip } else { *e.matrix() };
            Rotation::project(&(q * te))
        })
        .collect();
    let errors: Vec<f64> = aligned.iter().zip(truth).map(|(a, t)| rotation_distance(a, t)).collect();
    let mean_error = errors.iter().sum::<f64>() / errors.len() as f64;
    let max_error = errors.iter().cloned().fold(0.0, f64::max);
    Ok(Alignment { aligned, mean_error, max_error, transform: q, reflected })
}
