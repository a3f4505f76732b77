//! Synthetic heterogeneous datasets at the common-line level.
//!
//! Images get Haar-random orientations and a class label. For a pair in the
//! same class, with probability `p_correct` both true common lines are
//! emitted, each rotated in-plane by an independent angle uniform in
//! `[−ε, ε]`; otherwise (a misdetection) two independent uniform directions
//! are emitted. Pairs in different classes share no common line and always
//! get two independent uniform directions.
//!
//! Every image and every pair draws from its own random stream, so a dataset
//! is a pure function of its spec.

mod io;
mod sweep;

pub use io::{read_dataset, write_dataset, write_table, StoredDataset};

pub use sweep::{class_table_header, class_table_rows, run_noise_sweep, write_sweep_csv, SweepRow};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angular_distance, common_line_pair, sample_uniform_rotation, CommonLine, CommonLineTable, Rotation};
use crate::graph::Partition;
use crate::rng::{derive_seed, substream};
use rand::Rng as _;

/// Lines within this angle of the truth count as correctly detected (10°).
pub const CORRECT_LINE_ANGLE: f64 = 10.0 * std::f64::consts::PI / 180.0;

const ROTATION_STREAM: u64 = 0x0001;
const PAIR_STREAM: u64 = 0x0002;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub class_sizes: Vec<usize>,
    /// Bound on the in-plane error of a correctly detected line, radians.
    #[serde(default)]
    pub eps_line: f64,
    /// Fraction of in-class pairs whose lines are detected correctly.
    #[serde(default = "one")]
    pub p_correct: f64,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

impl SimSpec {
    pub fn balanced(n: usize, k: usize, eps_line: f64, p_correct: f64, seed: u64) -> Self {
        let mut class_sizes = vec![n / k; k];
        for s in class_sizes.iter_mut().take(n % k) {
            *s += 1;
        }
        SimSpec { class_sizes, eps_line, p_correct, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.class_sizes.is_empty() {
            return Err(Error::InvalidConfig("at least one class is required".into()));
        }
        if !(0.0..=1.0).contains(&self.p_correct) {
            return Err(Error::InvalidConfig(format!("p_correct {} outside [0, 1]", self.p_correct)));
        }
        if !(self.eps_line >= 0.0) || !self.eps_line.is_finite() {
            return Err(Error::InvalidConfig(format!("eps_line {} must be a finite nonnegative angle", self.eps_line)));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.class_sizes.iter().sum()
    }
}

/// How the lines of one unordered pair were generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairKind {
    /// Same class, true lines with bounded jitter.
    Correct,
    /// Same class, lines replaced by uniform directions.
    Misdetected,
    /// Different classes, uniform directions.
    CrossClass,
    /// Same class, coincident viewing directions: left invalid.
    Degenerate,
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub table: CommonLineTable,
    pub truth_rotations: Vec<Rotation>,
    pub truth_partition: Partition,
    /// Generation kind of each unordered pair `(i, j)`, `i < j`, row-major
    /// over the strict upper triangle. Empty for datasets read from disk.
    pub pair_kinds: Vec<PairKind>,
}

/// Position of `(i, j)`, `i < j`, in the strict upper triangle.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub fn simulate_dataset(spec: &SimSpec) -> Result<Dataset> {
    spec.validate()?;
    let n = spec.n();
    let truth_partition = Partition::from_sizes(&spec.class_sizes);
    let rot_seed = derive_seed(spec.seed, ROTATION_STREAM);
    let truth_rotations: Vec<Rotation> = (0..n)
        .into_par_iter()
        .map(|i| sample_uniform_rotation(&mut substream(rot_seed, i as u64)))
        .collect();

    let pair_seed = derive_seed(spec.seed, PAIR_STREAM);
    let rows: Vec<Vec<(PairKind, Option<(CommonLine, CommonLine)>)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| {
                    let mut rng = substream(pair_seed, (i * n + j) as u64);
                    if truth_partition.label(i) != truth_partition.label(j) {
                        let lines = (CommonLine::sample_uniform(&mut rng), CommonLine::sample_uniform(&mut rng));
                        return (PairKind::CrossClass, Some(lines));
                    }
                    let correct = rng.random::<f64>() < spec.p_correct;
                    if !correct {
                        let lines = (CommonLine::sample_uniform(&mut rng), CommonLine::sample_uniform(&mut rng));
                        return (PairKind::Misdetected, Some(lines));
                    }
                    match common_line_pair(&truth_rotations[i], &truth_rotations[j]) {
                        Ok((cij, cji)) => {
                            let eps = spec.eps_line;
                            let a = cij.rotated(jitter(&mut rng, eps));
                            let b = cji.rotated(jitter(&mut rng, eps));
                            assert!(angular_distance(&a, &cij) <= eps + 1e-12);
                            assert!(angular_distance(&b, &cji) <= eps + 1e-12);
                            (PairKind::Correct, Some((a, b)))
                        }
                        Err(_) => (PairKind::Degenerate, None),
                    }
                })
                .collect()
        })
        .collect();

    let mut table = CommonLineTable::new(n);
    let mut pair_kinds = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for (i, row) in rows.into_iter().enumerate() {
        for (off, (kind, lines)) in row.into_iter().enumerate() {
            if let Some((a, b)) = lines {
                table.set_pair(i, i + 1 + off, a, b);
            }
            pair_kinds.push(kind);
        }
    }
    Ok(Dataset { table, truth_rotations, truth_partition, pair_kinds })
}

fn jitter(rng: &mut crate::rng::Rng, eps: f64) -> f64 {
    if eps == 0.0 {
        0.0
    } else {
        rng.random_range(-eps..=eps)
    }
}

/// Fraction of valid same-class pairs whose two lines are both within
/// [`CORRECT_LINE_ANGLE`] of the true common lines.
pub fn fraction_correct_lines(table: &CommonLineTable, truth_rotations: &[Rotation], truth: &Partition) -> f64 {
    let n = table.n();
    let (mut total, mut correct) = (0usize, 0usize);
    for i in 0..n {
        for j in i + 1..n {
            if truth.label(i) != truth.label(j) {
                continue;
            }
            let (Some((a, b)), Ok((cij, cji))) = (table.pair(i, j), common_line_pair(&truth_rotations[i], &truth_rotations[j])) else {
                continue;
            };
            total += 1;
            if angular_distance(&a, &cij) <= CORRECT_LINE_ANGLE && angular_distance(&b, &cji) <= CORRECT_LINE_ANGLE {
                correct += 1;
            }
        }
    }
    if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    }
}
