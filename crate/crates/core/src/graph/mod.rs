//! Consistency-weighted image graph, cut weights and the joint objective.
//!
//! Edge weight `w_ij = ‖R_i ĉ_ij − R_j ĉ_ji‖` (hats: lifted lines) vanishes
//! when both rotations and both lines are right. For a fixed set of
//! rotations the within-class weight and the cut weight add up to the total
//! weight, so minimizing one is maximizing the other. All sums count each
//! unordered pair once.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CommonLine, CommonLineTable, Rotation};

mod io;

pub use io::{read_binary, read_csv, write_binary, write_csv};

/// Symmetric nonnegative edge weights with zero diagonal, stored dense.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightGraph {
    n: usize,
    w: Vec<f64>,
}

impl WeightGraph {
    /// Validates a row-major `n × n` matrix.
    pub fn new(n: usize, w: Vec<f64>) -> Result<Self> {
        if w.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: w.len() });
        }
        for i in 0..n {
            if w[i * n + i] != 0.0 {
                return Err(Error::InvalidInput(format!("nonzero diagonal at {i}")));
            }
            for j in i + 1..n {
                let (a, b) = (w[i * n + j], w[j * n + i]);
                if a != b {
                    return Err(Error::InvalidInput(format!("asymmetric weight at ({i}, {j})")));
                }
                if !(a >= 0.0) || !a.is_finite() {
                    return Err(Error::InvalidInput(format!("weight {a} at ({i}, {j})")));
                }
            }
        }
        Ok(WeightGraph { n, w })
    }

    pub fn zeros(n: usize) -> Self {
        WeightGraph { n, w: vec![0.0; n * n] }
    }

    /// Builds from the strict upper triangle; `f(i, j)` is called for `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                w[i * n + j] = v;
                w[j * n + i] = v;
            }
        }
        WeightGraph::new(n, w)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.w[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    /// Sum over unordered pairs.
    pub fn total_weight(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                total += self.weight(i, j);
            }
        }
        total
    }
}

/// Assignment of `n` items to classes `0..k`. Classes may be empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("a partition needs at least one class".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::InvalidInput(format!("label {bad} out of range for k = {k}")));
        }
        Ok(Partition { labels, k })
    }

    /// Everything in class 0, classes `1..k` empty.
    pub fn single_class(n: usize, k: usize) -> Self {
        Partition { labels: vec![0; n], k: k.max(1) }
    }

    /// Consecutive blocks of the given sizes.
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let labels = sizes.iter().enumerate().flat_map(|(c, &s)| std::iter::repeat_n(c, s)).collect();
        Partition { labels, k: sizes.len().max(1) }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub(crate) fn set_label(&mut self, i: usize, class: usize) {
        debug_assert!(class < self.k);
        self.labels[i] = class;
    }

    /// Indices in `class`, ascending.
    pub fn members(&self, class: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.labels[i] == class).collect()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Applies `perm` to every label (`new = perm[old]`).
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.k];
        if perm.len() != self.k || perm.iter().any(|&p| p >= self.k || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidInput("relabeling is not a permutation".into()));
        }
        Ok(Partition { labels: self.labels.iter().map(|&l| perm[l]).collect(), k: self.k })
    }
}

/// `‖R_i ĉ_ij − R_j ĉ_ji‖`, in `[0, 2]`.
#[inline]
pub fn edge_weight(ri: &Rotation, cij: &CommonLine, rj: &Rotation, cji: &CommonLine) -> f64 {
    (ri.apply_line(cij) - rj.apply_line(cji)).norm()
}

/// Edge weight of pair `(i, j)` under `rotations`, or 0 for an invalid pair.
#[inline]
pub fn pair_weight(rotations: &[Rotation], table: &CommonLineTable, i: usize, j: usize) -> f64 {
    match table.pair(i, j) {
        Some((cij, cji)) => edge_weight(&rotations[i], &cij, &rotations[j], &cji),
        None => 0.0,
    }
}

/// Weight graph of all pairs; invalid pairs get weight 0.
///
/// Rows are computed in parallel, each entry independently, so the result
/// does not depend on the number of worker threads.
pub fn build_weight_graph(rotations: &[Rotation], table: &CommonLineTable) -> Result<WeightGraph> {
    let n = table.n();
    if rotations.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rotations.len() });
    }
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (i + 1..n).map(|j| pair_weight(rotations, table, i, j)).collect())
        .collect();
    let mut w = vec![0.0; n * n];
    for (i, row) in upper.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + 1 + off;
            w[i * n + j] = v;
            w[j * n + i] = v;
        }
    }
    Ok(WeightGraph { n, w })
}

fn check_sizes(w: &WeightGraph, p: &Partition) -> Result<()> {
    if p.n() != w.n() {
        return Err(Error::DimensionMismatch { expected: w.n(), got: p.n() });
    }
    Ok(())
}

/// Total weight of pairs whose endpoints lie in different classes.
pub fn cut_weight(w: &WeightGraph, p: &Partition) -> Result<f64> {
    check_sizes(w, p)?;
    let mut cut = 0.0;
    for i in 0..w.n() {
        let li = p.label(i);
        let row = w.row(i);
        for j in i + 1..w.n() {
            if p.label(j) != li {
                cut += row[j];
            }
        }
    }
    Ok(cut)
}

/// Total weight of pairs inside each class, summed class by class.
///
/// Summation order matches [`objective_f`], so for `w` built from the same
/// rotations the two agree bit for bit.
pub fn within_class_weight(w: &WeightGraph, p: &Partition) -> Result<f64> {
    check_sizes(w, p)?;
    Ok((0..p.k()).map(|c| members_weight(&p.members(c), |i, j| w.weight(i, j))).sum())
}

fn members_weight(members: &[usize], weight: impl Fn(usize, usize) -> f64) -> f64 {
    let mut total = 0.0;
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            total += weight(i, j);
        }
    }
    total
}

/// Sum of edge weights over valid pairs inside `members`, taken in order.
pub fn class_objective(rotations: &[Rotation], table: &CommonLineTable, members: &[usize]) -> f64 {
    members_weight(members, |i, j| pair_weight(rotations, table, i, j))
}

/// The joint objective: within-class consistency summed over classes.
pub fn objective_f(rotations: &[Rotation], p: &Partition, table: &CommonLineTable) -> Result<f64> {
    let n = table.n();
    if rotations.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rotations.len() });
    }
    if p.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.n() });
    }
    Ok((0..p.k()).map(|c| class_objective(rotations, table, &p.members(c))).sum())
}
