//! Eigenvalue spectra with multiplicity clustering.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative gap under which two eigenvalues are one cluster.
pub const DEFAULT_CLUSTER_TOLERANCE: f64 = 1e-9;

/// Values below `-NEGATIVE_CLAMP` are rejected; values in `[-NEGATIVE_CLAMP, 0)` become 0.
pub const NEGATIVE_CLAMP: f64 = 1e-10;

pub const SUM_TOLERANCE: f64 = 1e-10;

/// A run of eigenvalues treated as one node of multiplicity `multiplicity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// Representative value: the member mean, or exactly 0 if any member is 0.
    pub value: f64,
    pub multiplicity: usize,
    /// Index of the first member in the descending value list.
    pub start: usize,
}

/// Eigenvalues `p_r` sorted descending, partitioned into clusters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    cluster_tolerance: f64,
    clusters: Vec<Cluster>,
}

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(values, DEFAULT_CLUSTER_TOLERANCE)
    }

    /// Validate, clamp, sort and cluster. Clamping a small negative value
    /// renormalizes the remaining values to sum to one.
    pub fn with_tolerance(mut values: Vec<f64>, cluster_tolerance: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDimension);
        }
        if !(cluster_tolerance >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cluster tolerance must be non-negative, got {cluster_tolerance}"
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidDistribution(format!("non-finite value {v}")));
        }
        if let Some(v) = values.iter().find(|&&v| v < -NEGATIVE_CLAMP) {
            return Err(Error::NegativeEigenvalue(*v));
        }
        let mut clamped = false;
        for v in values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
                clamped = true;
            }
            if *v > 1.0 + SUM_TOLERANCE {
                return Err(Error::InvalidDistribution(format!("value {v} exceeds 1")));
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("values sum to {sum}")));
        }
        if clamped {
            values.iter_mut().for_each(|v| *v /= sum);
        }
        values.iter_mut().for_each(|v| *v = v.min(1.0));
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let clusters = cluster(&values, cluster_tolerance);
        Ok(Self { values, cluster_tolerance, clusters })
    }

    /// Pure state `(1, 0, ..., 0)` in dimension `dim`.
    pub fn pure(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        let mut v = vec![0.0; dim];
        v[0] = 1.0;
        Self::new(v)
    }

    /// Uniform mixture of `n` states in dimension `dim`.
    pub fn uniform(n: usize, dim: usize) -> Result<Self> {
        if n == 0 || n > dim {
            return Err(Error::InvalidArgument(format!("uniform mixture of {n} states in dimension {dim}")));
        }
        let mut v = vec![0.0; dim];
        v[..n].iter_mut().for_each(|x| *x = 1.0 / n as f64);
        // n * (1/n) may miss 1 by an ulp or so; that is inside SUM_TOLERANCE.
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cluster_tolerance(&self) -> f64 {
        self.cluster_tolerance
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn nonzero_clusters(&self) -> impl Iterator<Item = &Cluster> {
        self.clusters.iter().filter(|c| c.value > 0.0)
    }

    /// Number of entries belonging to non-zero clusters.
    pub fn rank(&self) -> usize {
        self.nonzero_clusters().map(|c| c.multiplicity).sum()
    }

    pub fn is_pure(&self) -> bool {
        self.rank() == 1
    }

    /// Node list for the divided-difference evaluators: each entry replaced by
    /// its cluster representative, descending.
    pub fn nodes(&self) -> Vec<f64> {
        self.clusters
            .iter()
            .flat_map(|c| std::iter::repeat_n(c.value, c.multiplicity))
            .collect()
    }

    /// Append zeros until the spectrum has `dim` entries.
    pub fn padded(&self, dim: usize) -> Result<Self> {
        if dim < self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: dim });
        }
        let mut v = self.values.clone();
        v.resize(dim, 0.0);
        Self::with_tolerance(v, self.cluster_tolerance)
    }

    /// First non-zero cluster of multiplicity above one, if any.
    pub fn degenerate_nonzero_cluster(&self) -> Option<Cluster> {
        self.nonzero_clusters().find(|c| c.multiplicity > 1).copied()
    }

    /// Rejects spectra whose non-zero eigenvalues are not pairwise distinct.
    pub fn require_distinct_nonzero(&self) -> Result<()> {
        match self.degenerate_nonzero_cluster() {
            Some(c) => Err(Error::DegenerateSpectrum { value: c.value, multiplicity: c.multiplicity }),
            None => Ok(()),
        }
    }

    /// Smallest gap between distinct cluster values relative to the larger one.
    pub fn min_relative_gap(&self) -> f64 {
        self.clusters
            .windows(2)
            .map(|w| (w[0].value - w[1].value) / w[0].value)
            .fold(f64::INFINITY, f64::min)
    }
}

fn cluster(sorted_desc: &[f64], tol: f64) -> Vec<Cluster> {
    let n = sorted_desc.len();
    let floor = 1.0 / n as f64;
    let mut out: Vec<Cluster> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        let split = i == n || {
            let (a, b) = (sorted_desc[i - 1], sorted_desc[i]);
            (a - b) > tol * a.max(floor)
        };
        if split {
            let members = &sorted_desc[start..i];
            let value = if members.contains(&0.0) {
                0.0
            } else {
                members.iter().sum::<f64>() / members.len() as f64
            };
            out.push(Cluster { value, multiplicity: i - start, start });
            start = i;
        }
    }
    out
}

/// Spread every degenerate non-zero cluster symmetrically about its value with
/// spacing `epsilon`, preserving the sum. Zero clusters are left alone since
/// the density and quadrature paths tolerate repeated zeros.
///
/// The caller accepts an error of order `epsilon * ln(epsilon)` in anything
/// computed from the perturbed spectrum.
pub fn perturb_spectrum(spectrum: &Spectrum, epsilon: f64) -> Result<Spectrum> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("perturbation must be positive, got {epsilon}")));
    }
    let n = spectrum.dim();
    let floor = 1.0 / n as f64;
    let mut values = Vec::with_capacity(n);
    for c in spectrum.clusters() {
        if c.value == 0.0 || c.multiplicity == 1 {
            values.extend(std::iter::repeat_n(c.value, c.multiplicity));
            continue;
        }
        if epsilon <= spectrum.cluster_tolerance() * c.value.max(floor) {
            return Err(Error::InvalidArgument(format!(
                "perturbation {epsilon:e} is below the cluster tolerance at {}",
                c.value
            )));
        }
        let half = (c.multiplicity - 1) as f64 / 2.0;
        if epsilon * half >= c.value {
            return Err(Error::InvalidArgument(format!(
                "perturbation {epsilon:e} would push a cluster at {} negative",
                c.value
            )));
        }
        values.extend((0..c.multiplicity).map(|j| c.value + epsilon * (half - j as f64)));
    }
    let out = Spectrum::with_tolerance(values, spectrum.cluster_tolerance())?;
    if let Some(c) = out.degenerate_nonzero_cluster() {
        return Err(Error::InvalidArgument(format!(
            "perturbation {epsilon:e} merges clusters near {}",
            c.value
        )));
    }
    Ok(out)
}
