//! Monte-Carlo estimates of the absolute entropy and of `P(s)`.
//!
//! Samples are split into fixed-size chunks; chunk `c` draws from
//! `stream.fork(c)`. Chunks are evaluated on up to `workers` threads and their
//! partial statistics are merged in chunk order, so the result depends only on
//! `(seed, stream_id, samples)` and never on the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::f_weight;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::sampling::{haar_unitary, random_sphere_weights};
use crate::spectrum::Spectrum;
use crate::state::{spectrum_of, DensityMatrix};

/// Samples per RNG chunk.
pub const CHUNK: usize = 4096;
pub const MIN_ENTROPY_SAMPLES: usize = 100;
pub const MIN_HISTOGRAM_SAMPLES: usize = 10_000;
pub const MIN_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// `sum_a f(<a|rho|a>)` over Haar-random bases.
    Basis,
    /// `N f(sum_r p_r |Psi_r|^2)` over random pure states.
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// sample standard deviation over `sqrt(samples)`
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
    pub stream_id: u64,
}

impl McEstimate {
    /// `(mean - reference) / stderr`. Deviations at rounding level (relative
    /// `ZERO_DEVIATION`) count as zero, which matters when every sample is the
    /// same value and the standard error vanishes.
    pub fn z_score(&self, reference: f64) -> f64 {
        let d = self.mean - reference;
        if d.abs() <= ZERO_DEVIATION * reference.abs().max(1.0) {
            0.0
        } else if self.stderr > 0.0 {
            d / self.stderr
        } else {
            d.signum() * f64::INFINITY
        }
    }
}

/// Relative deviation treated as exact agreement by [`McEstimate::z_score`].
pub const ZERO_DEVIATION: f64 = 1e-12;

/// Running mean and centered second moment.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * other.n as f64 / n as f64,
            m2: self.m2 + other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64,
        }
    }
}

fn chunks(samples: usize) -> Vec<(u64, usize)> {
    (0..samples.div_ceil(CHUNK))
        .map(|c| (c as u64, CHUNK.min(samples - c * CHUNK)))
        .collect()
}

/// Runs `job` over every chunk on a pool of `workers` threads, preserving chunk order.
pub(crate) fn run_chunked<T, F>(samples: usize, workers: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, usize) -> T + Sync + Send,
{
    let plan = chunks(samples);
    par_map_ordered(plan.len(), workers, |i| job(plan[i].0, plan[i].1))
}

/// Maps `job` over `0..count` on `workers` threads; output is in index order.
pub(crate) fn par_map_ordered<T, F>(count: usize, workers: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if workers <= 1 {
        return (0..count).map(job).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(|| (0..count).into_par_iter().map(job).collect())
}

/// Monte-Carlo estimate of the absolute entropy of `rho`.
pub fn mc_entropy_estimate(
    rho: &DensityMatrix,
    samples: usize,
    stream: RngStream,
    mode: SamplingMode,
    workers: usize,
) -> Result<McEstimate> {
    if samples < MIN_ENTROPY_SAMPLES {
        return Err(Error::InsufficientSamples { required: MIN_ENTROPY_SAMPLES, found: samples });
    }
    let dim = rho.dim();
    let parts: Vec<Result<Moments>> = match mode {
        SamplingMode::Sphere => {
            let spectrum = spectrum_of(rho)?;
            run_chunked(samples, workers, |c, n| Ok(sphere_chunk(&spectrum, stream.fork(c), n)))
        }
        SamplingMode::Basis => run_chunked(samples, workers, |c, n| {
            let mut rng = stream.fork(c).rng();
            let mut m = Moments::default();
            for _ in 0..n {
                let basis = haar_unitary(dim, &mut rng)?;
                let probs = rho.outcome_probabilities(&basis)?;
                m.push(probs.iter().map(|&p| f_weight(p)).sum());
            }
            Ok(m)
        }),
    };
    let mut total = Moments::default();
    for p in parts {
        total = total.merge(p?);
    }
    Ok(finish(total, stream))
}

/// Sphere-mode estimate straight from a spectrum (no eigen-decomposition).
pub fn mc_entropy_from_spectrum(spectrum: &Spectrum, samples: usize, stream: RngStream, workers: usize) -> Result<McEstimate> {
    if samples < MIN_ENTROPY_SAMPLES {
        return Err(Error::InsufficientSamples { required: MIN_ENTROPY_SAMPLES, found: samples });
    }
    let parts = run_chunked(samples, workers, |c, n| sphere_chunk(spectrum, stream.fork(c), n));
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    Ok(finish(total, stream))
}

fn sphere_chunk(spectrum: &Spectrum, stream: RngStream, n: usize) -> Moments {
    let dim = spectrum.dim();
    let p = spectrum.values();
    let mut rng = stream.rng();
    let mut weights = Vec::with_capacity(dim);
    let mut m = Moments::default();
    for _ in 0..n {
        random_sphere_weights(dim, &mut rng, &mut weights);
        let s: f64 = p.iter().zip(&weights).map(|(a, b)| a * b).sum();
        m.push(dim as f64 * f_weight(s));
    }
    m
}

fn finish(m: Moments, stream: RngStream) -> McEstimate {
    let var = if m.n > 1 { m.m2 / (m.n - 1) as f64 } else { 0.0 };
    McEstimate {
        mean: m.mean,
        stderr: (var / m.n as f64).sqrt(),
        samples: m.n,
        seed: stream.seed,
        stream_id: stream.stream_id,
    }
}

/// Empirical density of `s` on equal-width bins over `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub densities: Vec<f64>,
    pub samples: usize,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        1.0 / self.bins() as f64
    }

    /// Binomial standard error of bin `i`'s density.
    pub fn density_stderr(&self, i: usize) -> f64 {
        let q = self.counts[i] as f64 / self.samples as f64;
        (q * (1.0 - q) / self.samples as f64).sqrt() / self.width()
    }
}

/// Histogram of `s = sum_r p_r |Psi_r|^2` over random pure states.
pub fn mc_density_histogram(
    spectrum: &Spectrum,
    dim: usize,
    samples: usize,
    bins: usize,
    stream: RngStream,
    workers: usize,
) -> Result<Histogram> {
    if samples < MIN_HISTOGRAM_SAMPLES {
        return Err(Error::InsufficientSamples { required: MIN_HISTOGRAM_SAMPLES, found: samples });
    }
    if bins < MIN_BINS {
        return Err(Error::InvalidArgument(format!("at least {MIN_BINS} bins required, got {bins}")));
    }
    let spectrum = spectrum.padded(dim)?;
    let p = spectrum.values();
    let parts = run_chunked(samples, workers, |c, n| {
        let mut rng = stream.fork(c).rng();
        let mut counts = vec![0u64; bins];
        let mut weights = Vec::with_capacity(dim);
        for _ in 0..n {
            random_sphere_weights(dim, &mut rng, &mut weights);
            let s: f64 = p.iter().zip(&weights).map(|(a, b)| a * b).sum();
            counts[bin_of(s, bins)] += 1;
        }
        counts
    });
    let mut counts = vec![0u64; bins];
    for part in parts {
        counts.iter_mut().zip(part).for_each(|(a, b)| *a += b);
    }
    let width = 1.0 / bins as f64;
    let edges = (0..=bins).map(|i| i as f64 * width).collect();
    let densities = counts.iter().map(|&c| c as f64 / (samples as f64 * width)).collect();
    Ok(Histogram { edges, counts, densities, samples })
}

fn bin_of(s: f64, bins: usize) -> usize {
    ((s * bins as f64) as usize).min(bins - 1)
}
