//! Monte Carlo checks of two distributional facts used by the precision
//! bound: the distance between independent uniform points on the unit sphere
//! has density `r/2` on `[0, 2]` (mean 4/3), and the maximum of `n`
//! independent Gaussians rarely exceeds `max μ + 2√(ln n) · max σ`.

use rand_distr::{Distribution, StandardNormal, UnitSphere};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::substream;

const CHUNK: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        let mut counts = vec![0u64; bins];
        let width = (hi - lo) / bins as f64;
        for &x in samples {
            if (lo..=hi).contains(&x) {
                let b = (((x - lo) / width) as usize).min(bins - 1);
                counts[b] += 1;
            }
        }
        Histogram { lo, hi, counts }
    }

    pub fn bin_edges(&self, b: usize) -> (f64, f64) {
        let width = (self.hi - self.lo) / self.counts.len() as f64;
        (self.lo + b as f64 * width, self.lo + (b + 1) as f64 * width)
    }

    /// Fraction of the counted samples in each bin.
    pub fn mass(&self) -> Vec<f64> {
        let total: u64 = self.counts.iter().sum();
        self.counts.iter().map(|&c| c as f64 / total.max(1) as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    pub samples: Vec<f64>,
    pub bins: Histogram,
}

impl EmpiricalDistribution {
    pub fn new(samples: Vec<f64>, lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("no samples".into()));
        }
        let bins = Histogram::new(&samples, lo, hi, bins);
        Ok(EmpiricalDistribution { samples, bins })
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }
}

/// CDF of the distance between two independent uniform points on S².
pub fn sphere_distance_cdf(r: f64) -> f64 {
    (r * r / 4.0).clamp(0.0, 1.0)
}

/// `n` independent draws of `‖u − v‖` for `u, v` uniform on the unit sphere,
/// histogrammed into 40 bins over `[0, 2]`.
pub fn sphere_pair_distance_samples(n: usize, seed: u64) -> Result<EmpiricalDistribution> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let chunks = n.div_ceil(CHUNK);
    let samples: Vec<f64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = substream(seed, c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            (0..len)
                .map(move |_| {
                    let u: [f64; 3] = UnitSphere.sample(&mut rng);
                    let v: [f64; 3] = UnitSphere.sample(&mut rng);
                    ((u[0] - v[0]).powi(2) + (u[1] - v[1]).powi(2) + (u[2] - v[2]).powi(2)).sqrt()
                })
                .collect::<Vec<_>>()
        })
        .collect();
    EmpiricalDistribution::new(samples, 0.0, 2.0, 40)
}

/// One-sample Kolmogorov–Smirnov statistic `sup |F_n − F|`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// The high-probability bound `max μ + 2√(ln n) · max σ` on the maximum of
/// `n` independent Gaussians.
pub fn max_gaussian_bound(mus: &[f64], sigmas: &[f64]) -> f64 {
    let n = mus.len() as f64;
    let max_mu = mus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_sigma = sigmas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max_mu + 2.0 * n.ln().sqrt() * max_sigma
}

/// Fraction of `trials` in which the maximum of independent `N(μ_i, σ_i²)`
/// draws exceeds [`max_gaussian_bound`].
pub fn max_gaussian_bound_check(mus: &[f64], sigmas: &[f64], trials: usize, seed: u64) -> Result<f64> {
    if mus.len() != sigmas.len() {
        return Err(Error::DimensionMismatch { expected: mus.len(), got: sigmas.len() });
    }
    if mus.len() < 2 || trials == 0 {
        return Err(Error::InvalidInput("need at least two variables and one trial".into()));
    }
    if sigmas.iter().any(|&s| !(s >= 0.0)) {
        return Err(Error::InvalidInput("standard deviations must be nonnegative".into()));
    }
    let bound = max_gaussian_bound(mus, sigmas);
    let exceed = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = substream(seed, t as u64);
            let max = mus
                .iter()
                .zip(sigmas)
                .map(|(&mu, &s)| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    mu + s * z
                })
                .fold(f64::NEG_INFINITY, f64::max);
            max > bound
        })
        .count();
    Ok(exceed as f64 / trials as f64)
}
