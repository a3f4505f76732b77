//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion.
//!
//! Failures are reported, not raised, so that the workspace test run stays
//! usable as a record; set `ACCEPTANCE_STRICT=1` to exit non-zero on any
//! failure.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use heterocut::geometry::perturb_rotation;
use heterocut::graph::{cut_weight, Partition, WeightGraph};
use heterocut::pipeline::{
    partition_with_rotations, precision, run_pipeline, Initialization, MaxCutSolver, PipelineConfig,
};
use heterocut::rng::{derive_seed, rng_from_seed, substream};
use heterocut::sim::{run_noise_sweep, simulate_dataset, SimSpec};
use heterocut::solvers::{brute_force_maxkcut, maxcut_gw};
use heterocut::stats::{ks_statistic, max_gaussian_bound_check, sphere_distance_cdf, sphere_pair_distance_samples};
use heterocut::sync::align_rotations;
use rand::Rng;

/// Precision reached under ε-accurate rotations in a 20-seed pilot
/// (seeds 1000..1020, every run at 1.0), less a rounding margin.
const EPS_ROTATION_PRECISION: f64 = 0.99;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("bipartite exactness", bipartite_exactness),
        ("gw approximation ratio", gw_ratio),
        ("pipeline convergence", convergence),
        ("noiseless recovery with true rotations", noiseless_truth),
        ("noiseless recovery end to end", noiseless_end_to_end),
        ("precision under eps-accurate rotations", eps_rotations),
        ("precision trend over line noise", noise_trend),
        ("unbalanced classes equalize", unbalanced),
        ("sphere distance and gaussian maximum", distribution_checks),
        ("cli determinism across thread counts", cli_determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let o = run();
        failed += usize::from(!o.pass);
        println!(
            "{}  {name} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {failed} failing criteria");
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}

fn bipartite_exactness() -> Outcome {
    let mut worst = 0.0f64;
    let mut mismatches = 0;
    for g in 0..50u64 {
        let mut rng = rng_from_seed(derive_seed(1, g));
        let n = rng.random_range(6..=14);
        let left = rng.random_range(1..n);
        let w = WeightGraph::from_fn(n, |i, j| if (i < left) != (j < left) { 1.0 - rng.random::<f64>() } else { 0.0 })
            .unwrap();
        let gw = maxcut_gw(&w, 100, g).unwrap();
        let best = cut_weight(&w, &brute_force_maxkcut(&w, 2).unwrap()).unwrap();
        let blocks = Partition::new((0..n).map(|i| usize::from(i >= left)).collect(), 2).unwrap();
        let full = gw.cut == blocks || gw.cut.relabel(&[1, 0]).unwrap() == blocks;
        worst = worst.max((gw.cut_value - best).abs());
        mismatches += usize::from(!full || (gw.cut_value - best).abs() > 1e-9);
    }
    outcome(mismatches == 0, format!("50 graphs, {mismatches} mismatches, max |gw - optimum| = {worst:.1e}"))
}

fn gw_ratio() -> Outcome {
    let mut worst = f64::INFINITY;
    for g in 0..100u64 {
        let mut rng = rng_from_seed(derive_seed(2, g));
        let n = rng.random_range(4..=14);
        let w = WeightGraph::from_fn(n, |_, _| rng.random::<f64>()).unwrap();
        let gw = maxcut_gw(&w, 100, g).unwrap().cut_value;
        let best = cut_weight(&w, &brute_force_maxkcut(&w, 2).unwrap()).unwrap();
        worst = worst.min(gw / best);
    }
    outcome(worst >= 0.87, format!("100 graphs, worst ratio {worst:.4}"))
}

fn convergence() -> Outcome {
    let mut bad = 0;
    let mut longest = 0;
    for run in 0..100u64 {
        let mut rng = rng_from_seed(derive_seed(3, run));
        let spec = SimSpec::balanced(60, 2, rng.random_range(0.0..0.1), rng.random_range(0.2..1.0), run);
        let data = simulate_dataset(&spec).unwrap();
        let cfg = PipelineConfig {
            seed: run,
            solver: if run % 2 == 0 { MaxCutSolver::Gw } else { MaxCutSolver::Local },
            init: if run % 4 < 2 { Initialization::AllInOne } else { Initialization::RandomBalanced },
            ..PipelineConfig::default()
        };
        let out = run_pipeline(&data.table, &cfg).unwrap();
        let fs = out.objective_history();
        longest = longest.max(fs.len());
        if !fs.windows(2).all(|w| w[1] <= w[0]) || fs.len() > cfg.max_iters {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("100 runs, {bad} violations, longest trace {longest}"))
}

fn noiseless_specs() -> Vec<SimSpec> {
    (0..10).map(|s| SimSpec::balanced(100, 2, 0.0, 1.0, 4000 + s)).collect()
}

fn noiseless_truth() -> Outcome {
    let precisions: Vec<f64> = noiseless_specs()
        .iter()
        .map(|spec| {
            let data = simulate_dataset(spec).unwrap();
            let cfg = PipelineConfig { seed: spec.seed, ..PipelineConfig::default() };
            let (p, _) = partition_with_rotations(&data.table, &data.truth_rotations, &cfg).unwrap();
            precision(&p, &data.truth_partition).unwrap().min_precision
        })
        .collect();
    outcome(precisions.iter().all(|&p| p == 1.0), format!("precisions {precisions:?}"))
}

fn noiseless_end_to_end() -> Outcome {
    let mut good = 0;
    let mut worst_error = 0.0f64;
    for spec in noiseless_specs() {
        let data = simulate_dataset(&spec).unwrap();
        let cfg = PipelineConfig { seed: spec.seed, ..PipelineConfig::default() };
        let out = run_pipeline(&data.table, &cfg).unwrap();
        let report = precision(&out.state.partition, &data.truth_partition).unwrap();
        let mut max_error = 0.0f64;
        for class in 0..2 {
            let members = out.state.partition.members(class);
            let est: Vec<_> = members.iter().map(|&i| out.state.rotations[i]).collect();
            let truth: Vec<_> = members.iter().map(|&i| data.truth_rotations[i]).collect();
            max_error = max_error.max(align_rotations(&est, &truth).unwrap().max_error);
        }
        worst_error = worst_error.max(max_error);
        good += usize::from(report.min_precision == 1.0 && max_error <= 1e-2);
    }
    outcome(good >= 9, format!("{good}/10 seeds exact with rotation error <= 1e-2 (worst error {worst_error:.2e})"))
}

fn eps_rotations() -> Outcome {
    let eps = 0.05;
    let floor = 0.87 - 63.0 / 4.0 * eps;
    let precisions: Vec<f64> = (0..20u64)
        .map(|seed| {
            let data = simulate_dataset(&SimSpec::balanced(500, 2, eps, 1.0, seed)).unwrap();
            let mut rng = substream(seed, 77);
            let rotations: Vec<_> = data.truth_rotations.iter().map(|r| perturb_rotation(r, eps, &mut rng)).collect();
            let cfg = PipelineConfig { seed, ..PipelineConfig::default() };
            let (p, _) = partition_with_rotations(&data.table, &rotations, &cfg).unwrap();
            precision(&p, &data.truth_partition).unwrap().min_precision
        })
        .collect();
    let above_floor = precisions.iter().all(|&p| p >= floor);
    let calibrated = precisions.iter().filter(|&&p| p >= EPS_ROTATION_PRECISION).count();
    let min = precisions.iter().copied().fold(1.0, f64::min);
    outcome(
        above_floor && calibrated >= 18,
        format!("floor {floor:.4} held in all: {above_floor}; {calibrated}/20 >= {EPS_ROTATION_PRECISION}; min {min:.4}"),
    )
}

fn noise_trend() -> Outcome {
    let levels = [0.9, 0.7, 0.4, 0.25, 0.1, 0.05];
    let seeds = 3u64;
    let specs: Vec<SimSpec> = levels
        .iter()
        .flat_map(|&p| (0..seeds).map(move |s| SimSpec::balanced(500, 2, 0.05, p, 5000 + s)))
        .collect();
    let rows = run_noise_sweep(&specs, &PipelineConfig::default()).unwrap();
    let means: Vec<f64> = rows
        .chunks(seeds as usize)
        .map(|c| c.iter().map(|r| r.precision.min_precision).sum::<f64>() / seeds as f64)
        .collect();
    let monotone = means.windows(2).all(|w| w[1] <= w[0]);
    let high = means[0] >= 0.95 && means[1] >= 0.95;
    let low = means[5] >= 0.6;
    let summary: Vec<String> = levels.iter().zip(&means).map(|(p, m)| format!("{p}:{m:.4}")).collect();
    outcome(
        monotone && high && low,
        format!(
            "mean precision by p_correct [{}]; non-increasing {monotone}, >=0.95 at p>=0.7 {high}, >=0.6 at p=0.05 {low}",
            summary.join(", ")
        ),
    )
}

fn unbalanced() -> Outcome {
    let sizes: Vec<usize> = (0..10u64)
        .map(|seed| {
            let spec = SimSpec { class_sizes: vec![400, 100], eps_line: 0.05, p_correct: 0.25, seed: 6000 + seed };
            let data = simulate_dataset(&spec).unwrap();
            let out = run_pipeline(&data.table, &PipelineConfig { seed, ..PipelineConfig::default() }).unwrap();
            let report = precision(&out.state.partition, &data.truth_partition).unwrap();
            report.estimated_sizes()[report.estimated_for_true(1)]
        })
        .collect();
    let larger = sizes.iter().filter(|&&s| s > 100).count();
    outcome(larger >= 8, format!("{larger}/10 seeds; estimated sizes of the 100-image class {sizes:?}"))
}

fn distribution_checks() -> Outcome {
    let d = sphere_pair_distance_samples(1_000_000, 7).unwrap();
    let mean = d.mean();
    let ks = ks_statistic(&d.samples, sphere_distance_cdf);
    let n = 10_000;
    let rate = max_gaussian_bound_check(&vec![0.0; n], &vec![1.0; n], 1_000, 8).unwrap();
    outcome(
        (mean - 4.0 / 3.0).abs() <= 0.01 && ks < 0.002 && rate <= 0.01,
        format!("mean {mean:.5}, ks {ks:.5}, exceedance at n=1e4 {rate:.4}"),
    )
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_heterocut");
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("spec.json"), r#"{"class_sizes": [70, 50], "eps_line": 0.05, "p_correct": 0.6, "seed": 11}"#).unwrap();
    std::fs::write(d.join("cfg.json"), r#"{"k": 2, "seed": 5}"#).unwrap();
    std::fs::write(
        d.join("specs.json"),
        r#"[{"class_sizes": [40, 40], "p_correct": 0.8, "seed": 1}, {"class_sizes": [40, 40], "p_correct": 0.4, "seed": 2}]"#,
    )
    .unwrap();
    let run = |args: &[&str]| {
        let status = Command::new(bin).args(args).current_dir(d).status().unwrap();
        assert!(status.success(), "heterocut {args:?} failed");
    };
    let mut outputs = Vec::new();
    for (tag, threads) in [("a", "1"), ("b", "4"), ("c", "4")] {
        let data = format!("data_{tag}.bin");
        run(&["--threads", threads, "simulate", "--spec", "spec.json", "--out", &data]);
        run(&[
            "--threads", threads, "partition", "--data", &data, "--config", "cfg.json",
            "--report", &format!("report_{tag}.json"), "--csv", &format!("table_{tag}.csv"),
        ]);
        run(&["--threads", threads, "sweep", "--specs", "specs.json", "--csv", &format!("sweep_{tag}.csv")]);
        run(&["--threads", threads, "stats", "--samples", "100000", "--trials", "100", "--out", &format!("stats_{tag}.json")]);
        outputs.push(
            ["data", "report", "table", "sweep", "stats"]
                .iter()
                .zip(["bin", "json", "csv", "csv", "json"])
                .map(|(stem, ext)| read(&d.join(format!("{stem}_{tag}.{ext}"))))
                .collect::<Vec<_>>(),
        );
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    outcome(same, format!("5 outputs over threads 1, 4, 4: identical {same}"))
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}
