use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Partition;

/// Above this many classes the matching is found by the Hungarian method
/// instead of enumerating permutations.
const EXHAUSTIVE_MAX_K: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionReport {
    /// `confusion[k][l] = |G̃_k ∩ G_l|`, estimated class `k`, true class `l`.
    pub confusion: Vec<Vec<usize>>,
    /// True class matched to each estimated class.
    pub matching: Vec<usize>,
    /// `|G̃_k ∩ G_{π(k)}| / |G̃_k|` per estimated class, 0 for an empty class.
    pub per_class: Vec<f64>,
    pub min_precision: f64,
    /// Estimated classes with no members.
    pub empty_classes: Vec<usize>,
}

impl PrecisionReport {
    /// Estimated class matched to true class `l`.
    pub fn estimated_for_true(&self, l: usize) -> usize {
        self.matching.iter().position(|&m| m == l).expect("matching is a permutation")
    }

    pub fn estimated_sizes(&self) -> Vec<usize> {
        self.confusion.iter().map(|row| row.iter().sum()).collect()
    }
}

pub fn precision(estimate: &Partition, truth: &Partition) -> Result<PrecisionReport> {
    if estimate.n() != truth.n() {
        return Err(Error::DimensionMismatch { expected: truth.n(), got: estimate.n() });
    }
    if estimate.k() != truth.k() {
        return Err(Error::InvalidInput(format!(
            "estimate has {} classes, truth has {}",
            estimate.k(),
            truth.k()
        )));
    }
    let k = truth.k();
    let mut confusion = vec![vec![0usize; k]; k];
    for (&e, &t) in estimate.labels().iter().zip(truth.labels()) {
        confusion[e][t] += 1;
    }
    let sizes: Vec<usize> = confusion.iter().map(|row| row.iter().sum()).collect();
    let class_precision = |matching: &[usize]| -> Vec<f64> {
        (0..k)
            .map(|e| if sizes[e] == 0 { 0.0 } else { confusion[e][matching[e]] as f64 / sizes[e] as f64 })
            .collect()
    };
    let matching = if k <= EXHAUSTIVE_MAX_K {
        // ties in the total are broken on the sorted precisions, which keeps
        // the report independent of how the estimate is labelled
        matching_exhaustive(&confusion, |m| {
            let mut p = class_precision(m);
            p.sort_by(f64::total_cmp);
            p
        })
    } else {
        hungarian_max(&confusion)
    };
    let per_class = class_precision(&matching);
    let empty_classes: Vec<usize> = (0..k).filter(|&e| sizes[e] == 0).collect();
    if !empty_classes.is_empty() {
        log::warn!("estimated classes {empty_classes:?} are empty; their precision is reported as 0");
    }
    Ok(PrecisionReport { min_precision: min_of(&per_class), confusion, matching, per_class, empty_classes })
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Permutation maximizing `Σ_k m[k][π(k)]`, enumerated in lexicographic
/// order; among equal totals the one with the largest `tiebreak` wins, then
/// the lexicographically first.
pub fn matching_exhaustive<T: PartialOrd>(m: &[Vec<usize>], tiebreak: impl Fn(&[usize]) -> T) -> Vec<usize> {
    let k = m.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = perm.clone();
    let mut best_key = (total(m, &perm), tiebreak(&perm));
    while next_permutation(&mut perm) {
        let key = (total(m, &perm), tiebreak(&perm));
        if key.0 > best_key.0 || (key.0 == best_key.0 && key.1.partial_cmp(&best_key.1) == Some(std::cmp::Ordering::Greater)) {
            best_key = key;
            best.clone_from(&perm);
        }
    }
    best
}

fn total(m: &[Vec<usize>], perm: &[usize]) -> usize {
    perm.iter().enumerate().map(|(r, &c)| m[r][c]).sum()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("exists by choice of i");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Maximum-weight perfect matching of a square matrix by the Hungarian
/// method (shortest augmenting paths with potentials), `O(k³)`.
pub fn hungarian_max(m: &[Vec<usize>]) -> Vec<usize> {
    let k = m.len();
    let big = m.iter().flatten().copied().max().unwrap_or(0) as i64;
    let cost = |r: usize, c: usize| big - m[r][c] as i64;
    // 1-based arrays, column 0 is the virtual source
    let mut u = vec![0i64; k + 1];
    let mut v = vec![0i64; k + 1];
    let mut owner = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for row in 1..=k {
        owner[0] = row;
        let mut col0 = 0;
        let mut minv = vec![i64::MAX; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[col0] = true;
            let r0 = owner[col0];
            let mut delta = i64::MAX;
            let mut col1 = 0;
            for c in 1..=k {
                if used[c] {
                    continue;
                }
                let cur = cost(r0 - 1, c - 1) - u[r0] - v[c];
                if cur < minv[c] {
                    minv[c] = cur;
                    way[c] = col0;
                }
                if minv[c] < delta {
                    delta = minv[c];
                    col1 = c;
                }
            }
            for c in 0..=k {
                if used[c] {
                    u[owner[c]] += delta;
                    v[c] -= delta;
                } else {
                    minv[c] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            owner[col0] = owner[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut matching = vec![0; k];
    for c in 1..=k {
        matching[owner[c] - 1] = c - 1;
    }
    matching
}
