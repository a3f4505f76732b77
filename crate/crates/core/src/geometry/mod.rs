//! SO(3) primitives and common-line geometry.
//!
//! A projection image with orientation `R` samples the central plane spanned
//! by the first two columns of `R`. Two such planes meet in a line through
//! the origin, and the in-plane coordinates of that line in each image are
//! the pair's common lines `(c_ij, c_ji)`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector2, Vector3};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod table;

pub use table::CommonLineTable;

/// Tolerance used when validating orthogonality and the determinant.
pub const ROTATION_TOL: f64 = 1e-12;

/// Two viewing directions closer than this (in `|r3_i x r3_j|`) have no
/// well-defined common line.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

/// An element of SO(3).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Matrix3::identity())
    }

    /// Wraps `m` after checking `m mᵀ = I` and `det m = 1` to [`ROTATION_TOL`].
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let err = (m * m.transpose() - Matrix3::identity()).amax();
        let det = m.determinant();
        if err > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
            return Err(Error::InvalidInput(format!(
                "not a rotation: orthogonality error {err:e}, det {det}"
            )));
        }
        Ok(Rotation(m))
    }

    /// Nearest rotation to an arbitrary 3x3 matrix in Frobenius norm.
    pub fn project(m: &Matrix3<f64>) -> Self {
        let svd = m.svd(true, true);
        let u = svd.u.expect("u requested");
        let v_t = svd.v_t.expect("v_t requested");
        let mut d = Matrix3::identity();
        if (u * v_t).determinant() < 0.0 {
            d[(2, 2)] = -1.0;
        }
        Rotation(u * d * v_t)
    }

    /// Rotation by `angle` radians about `axis` (normalized internally).
    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Self {
        let axis = nalgebra::Unit::new_normalize(*axis);
        Rotation(*nalgebra::Rotation3::from_axis_angle(&axis, angle).matrix())
    }

    pub fn from_quaternion(q: &UnitQuaternion<f64>) -> Self {
        Rotation(*q.to_rotation_matrix().matrix())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Rotation(self.0.transpose())
    }

    /// Column `k` (0-based) of the matrix.
    pub fn column(&self, k: usize) -> Vector3<f64> {
        self.0.column(k).into_owned()
    }

    /// Viewing direction: the third column.
    pub fn view_direction(&self) -> Vector3<f64> {
        self.column(2)
    }

    /// Maps an in-plane direction into ℝ³ through the first two columns.
    pub fn apply_line(&self, c: &CommonLine) -> Vector3<f64> {
        self.0 * lift(c)
    }

    /// Largest deviation from orthogonality and from unit determinant.
    pub fn invariant_error(&self) -> f64 {
        let orth = (self.0 * self.0.transpose() - Matrix3::identity()).amax();
        orth.max((self.0.determinant() - 1.0).abs())
    }

    pub fn as_rows(&self) -> [[f64; 3]; 3] {
        let m = &self.0;
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Result<Self> {
        Rotation::new(Matrix3::from_fn(|r, c| rows[r][c]))
    }
}

impl std::ops::Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

/// A unit direction in an image's Fourier plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonLine(Vector2<f64>);

impl CommonLine {
    /// Normalizes `(x, y)`; fails on a zero vector.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let n = x.hypot(y);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidInput(format!("cannot normalize ({x}, {y})")));
        }
        Ok(CommonLine(Vector2::new(x / n, y / n)))
    }

    /// Keeps `(x, y)` bit for bit if it is already unit length to rounding.
    pub fn from_unit(x: f64, y: f64) -> Result<Self> {
        let n = x.hypot(y);
        if !((n - 1.0).abs() <= ROTATION_TOL) {
            return Err(Error::InvalidInput(format!("({x}, {y}) is not a unit vector")));
        }
        Ok(CommonLine(Vector2::new(x, y)))
    }

    pub fn from_angle(theta: f64) -> Self {
        CommonLine(Vector2::new(theta.cos(), theta.sin()))
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }

    pub fn y(&self) -> f64 {
        self.0.y
    }

    pub fn vector(&self) -> &Vector2<f64> {
        &self.0
    }

    pub fn angle(&self) -> f64 {
        self.0.y.atan2(self.0.x)
    }

    /// The same line rotated in-plane by `delta` radians.
    pub fn rotated(&self, delta: f64) -> Self {
        let (s, c) = delta.sin_cos();
        CommonLine(Vector2::new(c * self.0.x - s * self.0.y, s * self.0.x + c * self.0.y))
    }

    /// A direction uniform on the unit circle.
    pub fn sample_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        CommonLine::from_angle(rng.random::<f64>() * 2.0 * PI)
    }
}

/// Zero-pads an in-plane direction to ℝ³.
pub fn lift(c: &CommonLine) -> Vector3<f64> {
    Vector3::new(c.0.x, c.0.y, 0.0)
}

/// Common lines `(c_ij, c_ji)` of two images with orientations `ri`, `rj`.
///
/// Both lines are the in-plane coordinates of the normalized cross product
/// `r3_i x r3_j`, taken in that order, so the result depends only on the
/// relative geometry and swapping the arguments negates both lines.
pub fn common_line_pair(ri: &Rotation, rj: &Rotation) -> Result<(CommonLine, CommonLine)> {
    let cross = ri.view_direction().cross(&rj.view_direction());
    let norm = cross.norm();
    if norm < DEGENERACY_THRESHOLD {
        return Err(Error::DegeneratePair(norm));
    }
    let q = cross / norm;
    let a = ri.matrix().transpose() * q;
    let b = rj.matrix().transpose() * q;
    // q lies in both central planes, so the dropped third coordinates vanish
    // up to rounding; renormalize to keep the unit invariant tight.
    Ok((CommonLine::new(a.x, a.y)?, CommonLine::new(b.x, b.y)?))
}

/// Angle between two in-plane directions, in `[0, π]`.
pub fn angular_distance(c: &CommonLine, other: &CommonLine) -> f64 {
    c.0.perp(&other.0).abs().atan2(c.0.dot(&other.0))
}

/// Spectral norm of `ra - rb`.
pub fn rotation_distance(ra: &Rotation, rb: &Rotation) -> f64 {
    spectral_norm(&(ra.0 - rb.0))
}

pub(crate) fn spectral_norm(m: &Matrix3<f64>) -> f64 {
    m.singular_values().max()
}

/// Haar-uniform rotation from a uniformly random unit quaternion.
pub fn sample_uniform_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    loop {
        let w: f64 = StandardNormal.sample(rng);
        let x: f64 = StandardNormal.sample(rng);
        let y: f64 = StandardNormal.sample(rng);
        let z: f64 = StandardNormal.sample(rng);
        let q = Quaternion::new(w, x, y, z);
        if q.norm() > 1e-12 {
            return Rotation::from_quaternion(&UnitQuaternion::from_quaternion(q));
        }
    }
}

/// Random rotation within spectral distance `eps` of `r`.
///
/// Right-multiplies by a rotation of angle `θ` about a uniform axis where
/// `2 sin(θ/2) = s·eps` with `s` uniform in `[0, 1]`; `2 sin(θ/2)` is exactly
/// the spectral distance of such a perturbation.
pub fn perturb_rotation<R: Rng + ?Sized>(r: &Rotation, eps: f64, rng: &mut R) -> Rotation {
    assert!(eps >= 0.0, "perturbation bound must be nonnegative");
    if eps == 0.0 {
        return *r;
    }
    let axis: [f64; 3] = UnitSphere.sample(rng);
    let s: f64 = rng.random();
    let chord = (s * eps).min(2.0);
    let theta = 2.0 * (chord / 2.0).asin();
    let step = Rotation::from_axis_angle(&Vector3::from(axis), theta);
    Rotation::project(&(r.0 * step.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use approx::assert_abs_diff_eq;

    fn rot_x(theta: f64) -> Rotation {
        Rotation::from_axis_angle(&Vector3::x(), theta)
    }

    fn rot_z(theta: f64) -> Rotation {
        Rotation::from_axis_angle(&Vector3::z(), theta)
    }

    #[test]
    fn sampling_is_deterministic_and_valid() {
        let a = sample_uniform_rotation(&mut rng_from_seed(11));
        let b = sample_uniform_rotation(&mut rng_from_seed(11));
        assert_eq!(a, b);
        let mut rng = rng_from_seed(12);
        for _ in 0..1000 {
            let r = sample_uniform_rotation(&mut rng);
            assert!(r.invariant_error() < ROTATION_TOL);
        }
    }

    #[test]
    fn haar_trace_mean_vanishes() {
        // ∫ tr(R) dR = 0 over Haar measure.
        let mut rng = rng_from_seed(2024);
        let n = 100_000;
        let mean: f64 =
            (0..n).map(|_| sample_uniform_rotation(&mut rng).matrix().trace()).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.02, "mean trace {mean}");
    }

    #[test]
    fn identical_rotations_are_degenerate() {
        let i = Rotation::identity();
        assert!(matches!(common_line_pair(&i, &i), Err(Error::DegeneratePair(_))));
        // antiparallel viewing directions
        assert!(matches!(
            common_line_pair(&i, &rot_x(PI)),
            Err(Error::DegeneratePair(_))
        ));
    }

    #[test]
    fn quarter_turn_about_x() {
        // r3_i = e3, r3_j = -e2, so r3_i x r3_j = e1; Rᵢᵀe1 = e1, Rⱼᵀe1 = e1.
        let (cij, cji) = common_line_pair(&Rotation::identity(), &rot_x(PI / 2.0)).unwrap();
        assert_abs_diff_eq!(cij.x(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cij.y(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cji.x(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cji.y(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn lift_pads_with_zero() {
        assert_eq!(lift(&CommonLine::new(1.0, 0.0).unwrap()), Vector3::new(1.0, 0.0, 0.0));
        assert_eq!(lift(&CommonLine::new(0.0, 1.0).unwrap()), Vector3::new(0.0, 1.0, 0.0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let l = lift(&CommonLine::new(h, h).unwrap());
        assert_abs_diff_eq!(l.norm(), 1.0, epsilon = 1e-15);
        assert_eq!(l.z, 0.0);
    }

    #[test]
    fn angular_distance_cases() {
        let e1 = CommonLine::new(1.0, 0.0).unwrap();
        let e2 = CommonLine::new(0.0, 1.0).unwrap();
        assert_eq!(angular_distance(&e1, &e1), 0.0);
        assert_abs_diff_eq!(angular_distance(&e1, &e2), PI / 2.0, epsilon = 1e-15);
        let eps = 0.05_f64;
        let c = CommonLine::new(eps.cos(), eps.sin()).unwrap();
        assert_abs_diff_eq!(angular_distance(&e1, &c), eps, epsilon = 1e-12);
        // rounding can push the dot product past 1
        assert_eq!(angular_distance(&c, &c), 0.0);
    }

    #[test]
    fn rotation_distance_of_z_turn() {
        let mut rng = rng_from_seed(5);
        let r = sample_uniform_rotation(&mut rng);
        assert_eq!(rotation_distance(&r, &r), 0.0);
        let theta = 0.1_f64;
        // I - rot_z(θ) has eigenvalues 0 and 1 - e^{±iθ}, |1 - e^{iθ}| = 2|sin(θ/2)|.
        let d = rotation_distance(&r, &(r * rot_z(theta)));
        assert_abs_diff_eq!(d, 2.0 * (theta / 2.0).sin().abs(), epsilon = 1e-10);
    }

    #[test]
    fn perturbation_zero_is_identity_map() {
        let mut rng = rng_from_seed(8);
        let r = sample_uniform_rotation(&mut rng);
        assert_eq!(perturb_rotation(&r, 0.0, &mut rng), r);
    }

    #[test]
    fn perturbation_respects_bound() {
        let mut rng = rng_from_seed(9);
        let r = sample_uniform_rotation(&mut rng);
        let p = perturb_rotation(&r, 0.1, &mut rng);
        assert!(rotation_distance(&r, &p) <= 0.1);
        assert!(p.invariant_error() < ROTATION_TOL);

        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for _ in 0..10_000 {
            let d = rotation_distance(&r, &perturb_rotation(&r, 0.2, &mut rng));
            lo = lo.min(d);
            hi = hi.max(d);
        }
        assert!(hi <= 0.2 + 1e-12, "max {hi}");
        assert!(lo > 0.0);
    }

    #[test]
    fn project_recovers_rotation() {
        let mut rng = rng_from_seed(3);
        let r = sample_uniform_rotation(&mut rng);
        let noisy = r.matrix() * 1.3 + Matrix3::repeat(1e-3);
        let p = Rotation::project(&noisy);
        assert!(p.invariant_error() < ROTATION_TOL);
        assert!(rotation_distance(&p, &r) < 1e-2);
        assert!(Rotation::new(Matrix3::identity() * 2.0).is_err());
    }
}
