use crate::error::{Error, Result};
use crate::graph::{cut_weight, Partition, WeightGraph};

/// Largest number of labelings [`brute_force_maxkcut`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

/// Exhaustive maximum K-cut.
///
/// Vertex 0 is pinned to class 0 (cut weight is invariant under relabeling),
/// and the remaining labels are enumerated as an odometer with the cut
/// updated incrementally. Candidates within rounding distance of the best
/// are re-scored exactly.
pub fn brute_force_maxkcut(w: &WeightGraph, k: usize) -> Result<Partition> {
    let n = w.n();
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let count = (k as u64).checked_pow(n as u32).filter(|&c| c <= BRUTE_FORCE_LIMIT);
    if count.is_none() {
        return Err(Error::InstanceTooLarge(format!("{k}^{n} labelings exceeds {BRUTE_FORCE_LIMIT}")));
    }
    if n <= 1 || k == 1 {
        return Partition::new(vec![0; n], k);
    }

    let mut labels = vec![0usize; n];
    let mut current = 0.0;
    let mut best = labels.clone();
    let mut best_value = cut_weight(w, &Partition::new(best.clone(), k)?)?;
    let slack = 1e-9 * (1.0 + w.total_weight());

    loop {
        // advance the odometer over vertices 1..n
        let mut pos = n - 1;
        loop {
            let old = labels[pos];
            let new = (old + 1) % k;
            current += relabel_delta(w, &labels, pos, old, new);
            labels[pos] = new;
            if new != 0 {
                break;
            }
            if pos == 1 {
                let exact = cut_weight(w, &Partition::new(best.clone(), k)?)?;
                debug_assert!((exact - best_value).abs() <= slack);
                return Partition::new(best, k);
            }
            pos -= 1;
        }
        if current > best_value - slack {
            let exact = cut_weight(w, &Partition::new(labels.clone(), k)?)?;
            current = exact;
            if exact > best_value {
                best_value = exact;
                best.clone_from(&labels);
            }
        }
    }
}

/// Change in cut weight when vertex `v` moves from class `from` to `to`.
fn relabel_delta(w: &WeightGraph, labels: &[usize], v: usize, from: usize, to: usize) -> f64 {
    let row = w.row(v);
    let mut delta = 0.0;
    for (u, &l) in labels.iter().enumerate() {
        if u == v {
            continue;
        }
        if l == from {
            delta += row[u];
        } else if l == to {
            delta -= row[u];
        }
    }
    delta
}
