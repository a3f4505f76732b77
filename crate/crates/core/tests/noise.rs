use heterocut::geometry::angular_distance;
use heterocut::graph::pair_weight;
use heterocut::pipeline::{MaxCutSolver, PipelineConfig};
use heterocut::sim::{run_noise_sweep, simulate_dataset, SimSpec};

#[test]
fn precision_falls_with_line_noise() {
    let specs: Vec<SimSpec> = [0.9, 0.7, 0.3].iter().map(|&p| SimSpec::balanced(200, 2, 0.05, p, 21)).collect();
    let rows = run_noise_sweep(&specs, &PipelineConfig::default()).unwrap();
    let precisions: Vec<f64> = rows.iter().map(|r| r.precision.min_precision).collect();
    assert!(precisions.windows(2).all(|w| w[1] <= w[0]), "{precisions:?}");
    let pct: Vec<f64> = rows.iter().map(|r| r.pct_correct_lines).collect();
    assert!(pct.windows(2).all(|w| w[1] < w[0]), "{pct:?}");
}

#[test]
fn heavy_noise_gives_similar_class_sizes() {
    let specs: Vec<SimSpec> = (0..3).map(|s| SimSpec::balanced(200, 2, 0.05, 0.05, 30 + s)).collect();
    let cfg = PipelineConfig { solver: MaxCutSolver::Local, ..PipelineConfig::default() };
    for row in run_noise_sweep(&specs, &cfg).unwrap() {
        for &s in &row.estimated_sizes {
            assert!((s as f64 - 100.0).abs() <= 10.0, "{:?}", row.estimated_sizes);
        }
    }
}

#[test]
fn cross_class_weights_ignore_relative_orientation() {
    let data = simulate_dataset(&SimSpec { class_sizes: vec![320, 320], eps_line: 0.0, p_correct: 1.0, seed: 3 }).unwrap();
    let r = &data.truth_rotations;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in 0..320 {
        for j in 320..640 {
            let rel = r[i].transpose() * r[j];
            let angle = ((rel.matrix().trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos();
            xs.push(angle);
            ys.push(pair_weight(r, &data.table, i, j));
        }
    }
    assert!(xs.len() >= 100_000);
    let corr = pearson(&xs, &ys);
    assert!(corr.abs() < 0.02, "{corr}");
}

#[test]
fn correct_lines_within_ten_degrees() {
    let data = simulate_dataset(&SimSpec::balanced(60, 2, 0.1, 1.0, 5)).unwrap();
    let frac = heterocut::sim::fraction_correct_lines(&data.table, &data.truth_rotations, &data.truth_partition);
    assert_eq!(frac, 1.0);
    let (a, _) = data.table.pair(0, 1).unwrap();
    assert!(angular_distance(&a, &a) == 0.0);
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
