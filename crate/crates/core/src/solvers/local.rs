//! Multi-start local search for max-K-cut.
//!
//! Each start draws a uniform random labeling and then scans vertices in
//! index order, moving a vertex to the class that gains the most cut weight
//! whenever that gain is strictly positive. A pass without a move ends the
//! start. Ties keep the current label.

use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{cut_weight, Partition, WeightGraph};
use crate::rng::substream;

/// Outcome of refining one labeling to a local optimum.
#[derive(Clone, Debug)]
pub struct RefineOutcome {
    pub partition: Partition,
    /// Cut weight before any move, then after each accepted move.
    pub cut_history: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LocalSearchResult {
    pub partition: Partition,
    pub cut_value: f64,
    /// Final cut weight of every start, in start order.
    pub start_values: Vec<f64>,
    pub best_start: usize,
}

/// Single-vertex relabeling until no move strictly increases the cut.
pub fn refine_partition(w: &WeightGraph, initial: Partition) -> Result<RefineOutcome> {
    let n = w.n();
    if initial.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: initial.n() });
    }
    let k = initial.k();
    let mut part = initial;
    // to_class[v * k + c]: total weight from v to the members of class c
    let mut to_class = vec![0.0; n * k];
    for v in 0..n {
        let row = w.row(v);
        for u in 0..n {
            to_class[v * k + part.label(u)] += row[u];
        }
    }
    let mut cut = cut_weight(w, &part)?;
    let mut history = vec![cut];
    // moves below this are rounding noise in the running sums
    let threshold = 1e-12 * (1.0 + w.total_weight());

    loop {
        let mut moved = false;
        for v in 0..n {
            let from = part.label(v);
            let sums = &to_class[v * k..(v + 1) * k];
            let mut best = from;
            let mut best_gain = 0.0;
            for (c, &s) in sums.iter().enumerate() {
                let gain = sums[from] - s;
                if c != from && gain > best_gain {
                    best = c;
                    best_gain = gain;
                }
            }
            if best == from || best_gain <= threshold {
                continue;
            }
            part.set_label(v, best);
            let row = w.row(v);
            for u in 0..n {
                to_class[u * k + from] -= row[u];
                to_class[u * k + best] += row[u];
            }
            cut += best_gain;
            history.push(cut);
            moved = true;
        }
        if !moved {
            break;
        }
    }
    Ok(RefineOutcome { partition: part, cut_history: history })
}

/// Best of `starts` local searches from random labelings.
pub fn maxkcut_local(w: &WeightGraph, k: usize, starts: usize, seed: u64) -> Result<Partition> {
    Ok(maxkcut_local_detailed(w, k, starts, seed)?.partition)
}

/// [`maxkcut_local`] with per-start diagnostics.
///
/// Start `s` draws its labeling from stream `s` of `seed`, so starts can run
/// in any order on any number of threads.
pub fn maxkcut_local_detailed(w: &WeightGraph, k: usize, starts: usize, seed: u64) -> Result<LocalSearchResult> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if starts == 0 {
        return Err(Error::InvalidConfig("local search needs at least one start".into()));
    }
    let n = w.n();
    let runs: Vec<Result<(Partition, f64)>> = (0..starts)
        .into_par_iter()
        .map(|s| {
            let mut rng = substream(seed, s as u64);
            let labels = (0..n).map(|_| rng.random_range(0..k)).collect();
            let refined = refine_partition(w, Partition::new(labels, k)?)?;
            let value = cut_weight(w, &refined.partition)?;
            Ok((refined.partition, value))
        })
        .collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let mut best_start = 0;
    for (s, run) in runs.iter().enumerate() {
        if run.1 > runs[best_start].1 {
            best_start = s;
        }
    }
    let start_values = runs.iter().map(|r| r.1).collect();
    let (partition, cut_value) = runs.into_iter().nth(best_start).expect("at least one start");
    Ok(LocalSearchResult { partition, cut_value, start_values, best_start })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use crate::solvers::brute_force_maxkcut;
    use proptest::prelude::*;

    fn random_graph(n: usize, seed: u64) -> WeightGraph {
        let mut rng = rng_from_seed(seed);
        WeightGraph::from_fn(n, |_, _| rng.random::<f64>()).unwrap()
    }

    fn random_bipartite(n: usize, seed: u64) -> (WeightGraph, Vec<usize>) {
        let mut rng = rng_from_seed(seed);
        let side: Vec<usize> = (0..n).map(|i| if i == 0 { 0 } else if i == 1 { 1 } else { rng.random_range(0..2) }).collect();
        let w = WeightGraph::from_fn(n, |i, j| {
            if side[i] != side[j] {
                1.0 - rng.random::<f64>()
            } else {
                0.0
            }
        })
        .unwrap();
        (w, side)
    }

    #[test]
    fn each_vertex_alone_cuts_everything() {
        let w = random_graph(6, 1);
        let p = maxkcut_local(&w, 6, 4, 3).unwrap();
        assert!((cut_weight(&w, &p).unwrap() - w.total_weight()).abs() < 1e-12);
    }

    #[test]
    fn triangle_optimum() {
        let w = WeightGraph::new(3, vec![0.0, 3.0, 1.0, 3.0, 0.0, 1.0, 1.0, 1.0, 0.0]).unwrap();
        let p = maxkcut_local(&w, 2, 8, 0).unwrap();
        assert_eq!(cut_weight(&w, &p).unwrap(), 4.0);
    }

    #[test]
    fn bipartite_optimum_across_seeds() {
        let mut hits = 0;
        for seed in 0..50u64 {
            let n = 6 + (seed as usize % 9);
            let (w, _) = random_bipartite(n, 1000 + seed);
            let best = cut_weight(&w, &brute_force_maxkcut(&w, 2).unwrap()).unwrap();
            let got = cut_weight(&w, &maxkcut_local(&w, 2, 8, seed).unwrap()).unwrap();
            if (got - best).abs() <= 1e-9 {
                hits += 1;
            }
        }
        assert!(hits >= 48, "{hits}/50 optimal");
    }

    #[test]
    fn deterministic_given_seed() {
        let w = random_graph(40, 2);
        let a = maxkcut_local_detailed(&w, 3, 8, 17).unwrap();
        let b = maxkcut_local_detailed(&w, 3, 8, 17).unwrap();
        assert_eq!(a.partition, b.partition);
        assert_eq!(a.start_values, b.start_values);
        assert_eq!(a.cut_value, a.start_values[a.best_start]);
    }

    #[test]
    fn rejects_zero_starts() {
        assert!(maxkcut_local(&WeightGraph::zeros(3), 2, 0, 0).is_err());
    }

    proptest! {
        #[test]
        fn refinement_is_monotone(seed in any::<u64>(), n in 2usize..30, k in 2usize..5) {
            let w = random_graph(n, seed);
            let mut rng = rng_from_seed(seed ^ 1);
            let init = Partition::new((0..n).map(|_| rng.random_range(0..k)).collect(), k).unwrap();
            let out = refine_partition(&w, init).unwrap();
            for pair in out.cut_history.windows(2) {
                prop_assert!(pair[1] > pair[0]);
            }
            let exact = cut_weight(&w, &out.partition).unwrap();
            prop_assert!((exact - out.cut_history.last().unwrap()).abs() < 1e-9);
        }

        #[test]
        fn oracle_dominates(seed in any::<u64>(), n in 2usize..11) {
            let w = random_graph(n, seed);
            let local = cut_weight(&w, &maxkcut_local(&w, 2, 4, seed).unwrap()).unwrap();
            let best = cut_weight(&w, &brute_force_maxkcut(&w, 2).unwrap()).unwrap();
            prop_assert!(best >= local - 1e-12);
        }
    }
}
