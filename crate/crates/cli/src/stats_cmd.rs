use anyhow::Result;
use heterocut::rng::derive_seed;
use heterocut::stats::{ks_statistic, max_gaussian_bound_check, sphere_distance_cdf, sphere_pair_distance_samples};
use serde::Serialize;

#[derive(Serialize)]
pub struct StatsReport {
    samples: usize,
    seed: u64,
    mean: f64,
    expected_mean: f64,
    ks_statistic: f64,
    histogram: HistogramReport,
    gaussian_max: Vec<GaussianRow>,
}

#[derive(Serialize)]
struct HistogramReport {
    counts: Vec<u64>,
    expected: Vec<f64>,
    relative_error: Vec<f64>,
    max_relative_error: f64,
}

#[derive(Serialize)]
struct GaussianRow {
    n: usize,
    trials: usize,
    exceedance_rate: f64,
}

pub fn run(samples: usize, trials: usize, seed: u64) -> Result<StatsReport> {
    let dist = sphere_pair_distance_samples(samples, derive_seed(seed, 1))?;
    let expected: Vec<f64> = (0..dist.bins.counts.len())
        .map(|b| {
            let (lo, hi) = dist.bins.bin_edges(b);
            samples as f64 * (sphere_distance_cdf(hi) - sphere_distance_cdf(lo))
        })
        .collect();
    let relative_error: Vec<f64> =
        dist.bins.counts.iter().zip(&expected).map(|(&c, &e)| (c as f64 - e).abs() / e).collect();
    let gaussian_max = [100usize, 1_000, 10_000]
        .into_iter()
        .map(|n| {
            let rate = max_gaussian_bound_check(&vec![0.0; n], &vec![1.0; n], trials, derive_seed(seed, 2 + n as u64))?;
            Ok(GaussianRow { n, trials, exceedance_rate: rate })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StatsReport {
        samples,
        seed,
        mean: dist.mean(),
        expected_mean: 4.0 / 3.0,
        ks_statistic: ks_statistic(&dist.samples, sphere_distance_cdf),
        histogram: HistogramReport {
            max_relative_error: relative_error.iter().copied().fold(0.0, f64::max),
            counts: dist.bins.counts,
            expected,
            relative_error,
        },
        gaussian_max,
    })
}
