use heterocut::geometry::{common_line_pair, lift, sample_uniform_rotation, CommonLineTable};
use heterocut::graph::{build_weight_graph, cut_weight, within_class_weight, Partition, WeightGraph};
use heterocut::pipeline::{precision, run_pipeline, Initialization, MaxCutSolver, PipelineConfig};
use heterocut::rng::{derive_seed, rng_from_seed};
use heterocut::sim::{simulate_dataset, SimSpec};
use heterocut::solvers::{brute_force_maxkcut, maxcut_gw, maxkcut_local};
use heterocut::stats::sphere_pair_distance_samples;
use rand::Rng;

type Check = (&'static str, fn(u64) -> Result<(), String>);

const CHECKS: &[Check] = &[
    ("common lines satisfy the lifted identity", lifted_identity),
    ("exact geometry has zero edge weight", zero_weight),
    ("cut plus within-class weight is the total", cut_identity),
    ("gw is exact on bipartite graphs", bipartite),
    ("gw reaches 0.87 of the optimum", gw_ratio),
    ("local search never beats the exhaustive optimum", local_below_optimum),
    ("pipeline objective is non-increasing", monotone),
    ("precision ignores class labelling", label_invariance),
    ("sphere distances average 4/3", sphere_mean),
];

/// Runs every check, printing `PASS`/`FAIL` lines. True if all pass.
pub fn run(seed: u64) -> bool {
    let mut ok = true;
    for (name, check) in CHECKS {
        match check(seed) {
            Ok(()) => println!("PASS  {name}"),
            Err(msg) => {
                ok = false;
                println!("FAIL  {name}: {msg}");
            }
        }
    }
    ok
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lifted_identity(seed: u64) -> Result<(), String> {
    let mut rng = rng_from_seed(seed);
    for _ in 0..1000 {
        let (ri, rj) = (sample_uniform_rotation(&mut rng), sample_uniform_rotation(&mut rng));
        let (cij, cji) = common_line_pair(&ri, &rj).map_err(|e| e.to_string())?;
        let gap = (ri.matrix() * lift(&cij) - rj.matrix() * lift(&cji)).norm();
        ensure(gap < 1e-12, || format!("gap {gap:e}"))?;
    }
    Ok(())
}

fn zero_weight(seed: u64) -> Result<(), String> {
    let mut rng = rng_from_seed(seed);
    let rotations: Vec<_> = (0..30).map(|_| sample_uniform_rotation(&mut rng)).collect();
    let table = CommonLineTable::from_rotations(&rotations);
    let w = build_weight_graph(&rotations, &table).map_err(|e| e.to_string())?;
    let max = w.as_slice().iter().copied().fold(0.0, f64::max);
    ensure(max < 1e-12, || format!("largest weight {max:e}"))
}

fn random_graph(n: usize, seed: u64) -> WeightGraph {
    let mut rng = rng_from_seed(seed);
    WeightGraph::from_fn(n, |_, _| rng.random::<f64>()).expect("valid weights")
}

fn cut_identity(seed: u64) -> Result<(), String> {
    let mut rng = rng_from_seed(seed);
    for t in 0..50 {
        let w = random_graph(12, derive_seed(seed, t));
        let p = Partition::new((0..12).map(|_| rng.random_range(0..3)).collect(), 3).map_err(|e| e.to_string())?;
        let gap = cut_weight(&w, &p).unwrap() + within_class_weight(&w, &p).unwrap() - w.total_weight();
        ensure(gap.abs() < 1e-9, || format!("gap {gap:e}"))?;
    }
    Ok(())
}

fn bipartite(seed: u64) -> Result<(), String> {
    for t in 0..10 {
        let mut rng = rng_from_seed(derive_seed(seed, 100 + t));
        let n = rng.random_range(6..=12);
        let left = rng.random_range(1..n);
        let w = WeightGraph::from_fn(n, |i, j| if (i < left) != (j < left) { 1.0 - rng.random::<f64>() } else { 0.0 })
            .expect("valid weights");
        let sol = maxcut_gw(&w, 100, seed).map_err(|e| e.to_string())?;
        let total = w.total_weight();
        ensure((sol.cut_value - total).abs() <= 1e-9, || format!("cut {} of {total}", sol.cut_value))?;
    }
    Ok(())
}

fn gw_ratio(seed: u64) -> Result<(), String> {
    for t in 0..10 {
        let w = random_graph(10, derive_seed(seed, 200 + t));
        let best = cut_weight(&w, &brute_force_maxkcut(&w, 2).unwrap()).unwrap();
        let gw = maxcut_gw(&w, 100, seed).map_err(|e| e.to_string())?.cut_value;
        ensure(gw >= 0.87 * best, || format!("{gw} vs optimum {best}"))?;
    }
    Ok(())
}

fn local_below_optimum(seed: u64) -> Result<(), String> {
    for t in 0..10 {
        let w = random_graph(9, derive_seed(seed, 300 + t));
        let best = cut_weight(&w, &brute_force_maxkcut(&w, 3).unwrap()).unwrap();
        let local = cut_weight(&w, &maxkcut_local(&w, 3, 4, seed).unwrap()).unwrap();
        ensure(local <= best + 1e-9, || format!("{local} above optimum {best}"))?;
    }
    Ok(())
}

fn monotone(seed: u64) -> Result<(), String> {
    for t in 0..5 {
        let data = simulate_dataset(&SimSpec::balanced(40, 2, 0.05, 0.6, derive_seed(seed, 400 + t)))
            .map_err(|e| e.to_string())?;
        let cfg = PipelineConfig {
            seed: t,
            solver: if t % 2 == 0 { MaxCutSolver::Gw } else { MaxCutSolver::Local },
            init: Initialization::RandomBalanced,
            ..PipelineConfig::default()
        };
        let fs = run_pipeline(&data.table, &cfg).map_err(|e| e.to_string())?.objective_history();
        ensure(fs.windows(2).all(|w| w[1] <= w[0]), || format!("{fs:?}"))?;
    }
    Ok(())
}

fn label_invariance(seed: u64) -> Result<(), String> {
    let mut rng = rng_from_seed(seed);
    let truth = Partition::new((0..200).map(|_| rng.random_range(0..3)).collect(), 3).unwrap();
    let est = Partition::new((0..200).map(|_| rng.random_range(0..3)).collect(), 3).unwrap();
    let base = precision(&est, &truth).unwrap().min_precision;
    for perm in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        let p = precision(&est.relabel(&perm).unwrap(), &truth).unwrap().min_precision;
        ensure(p == base, || format!("{p} vs {base}"))?;
    }
    Ok(())
}

fn sphere_mean(seed: u64) -> Result<(), String> {
    let d = sphere_pair_distance_samples(200_000, seed).map_err(|e| e.to_string())?;
    let mean = d.mean();
    ensure((mean - 4.0 / 3.0).abs() < 0.01, || format!("mean {mean}"))
}
