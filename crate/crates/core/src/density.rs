//! The distribution `P(s)` of the outcome weight `s = sum_r p_r |Psi_r|^2`
//! over uniformly random pure states, and the absolute entropy obtained by
//! integrating `N f(s) P(s)` piece by piece.
//!
//! Everything here uses the Lagrange form `sum_r w_r (...)` with
//! `w_r = prod_{r' != r} 1 / (p_r - p_r')`, which is singular for repeated
//! non-zero eigenvalues. Such spectra are rejected with
//! [`Error::DegenerateSpectrum`]; see [`perturb_spectrum`](crate::spectrum::perturb_spectrum).

use serde::{Deserialize, Serialize};

use crate::entropy::{extended_bits, s0_exact};
use crate::error::{Error, Result};
use crate::precision::{Arithmetic, Double, Extended, Precision};
use crate::spectrum::Spectrum;

/// Below this estimated absolute rounding error the double evaluation is kept.
const DOUBLE_ERROR_BUDGET: f64 = 1e-13;

/// `P(s)` sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub spectrum: Spectrum,
    pub grid: Vec<f64>,
    pub densities: Vec<f64>,
}

impl DensityCurve {
    /// Trapezoid rule over the grid.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.densities.windows(2))
            .map(|(s, p)| 0.5 * (s[1] - s[0]) * (p[0] + p[1]))
            .sum()
    }
}

fn check(spectrum: &Spectrum, dim: usize) -> Result<()> {
    if spectrum.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: spectrum.dim() });
    }
    spectrum.require_distinct_nonzero()
}

/// `(p_r, w_r)` for every non-zero eigenvalue, with zeros (of any
/// multiplicity) entering `w_r` as `1 / p_r` factors.
fn lagrange_weights<A: Arithmetic>(arith: &A, spectrum: &Spectrum) -> Vec<(A::Num, A::Num)> {
    let nodes: Vec<(f64, usize)> = spectrum.clusters().iter().map(|c| (c.value, c.multiplicity)).collect();
    nodes
        .iter()
        .enumerate()
        .filter(|(_, (p, _))| *p > 0.0)
        .map(|(i, &(p, _))| {
            let pr = arith.num(p);
            let denom = nodes.iter().enumerate().filter(|(j, _)| *j != i).fold(arith.one(), |acc, (_, &(q, m))| {
                let d = pr.clone() - arith.num(q);
                acc * arith.powi(&d, m as u32)
            });
            (pr, arith.one() / denom)
        })
        .collect()
}

fn lagrange_weights_f64(spectrum: &Spectrum) -> Vec<(f64, f64)> {
    lagrange_weights(&Double, spectrum)
}

/// Probability density of `s` at one point.
///
/// Breakpoints are taken from the left: the term of `p_r` is included when
/// `p_r >= s`, so for `N = 2` a pure state gives `P(1) = 1`.
pub fn density_p(spectrum: &Spectrum, dim: usize, s: f64) -> Result<f64> {
    check(spectrum, dim)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("s = {s} outside [0, 1]")));
    }
    if dim == 1 {
        // s is identically 1: a point mass, not a density
        return Err(Error::InvalidArgument("P(s) is a point mass for N = 1".into()));
    }
    Ok(density_unchecked(&lagrange_weights_f64(spectrum), dim, s))
}

fn density_unchecked(weights: &[(f64, f64)], dim: usize, s: f64) -> f64 {
    let power = (dim - 2) as i32;
    let sum: f64 = weights
        .iter()
        .filter(|(p, _)| *p >= s)
        .map(|(p, w)| w * (p - s).powi(power))
        .sum();
    ((dim - 1) as f64 * sum).max(0.0)
}

/// `P(s)` on `points` equally spaced values covering `[0, 1]`.
pub fn density_curve(spectrum: &Spectrum, dim: usize, points: usize) -> Result<DensityCurve> {
    check(spectrum, dim)?;
    if points < 2 {
        return Err(Error::InvalidArgument("need at least two grid points".into()));
    }
    if dim == 1 {
        return Err(Error::InvalidArgument("P(s) is a point mass for N = 1".into()));
    }
    let weights = lagrange_weights_f64(spectrum);
    let grid: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
    let densities = grid.iter().map(|&s| density_unchecked(&weights, dim, s)).collect();
    Ok(DensityCurve { spectrum: spectrum.clone(), grid, densities })
}

/// Cumulative distribution `Pr[s' <= s] = 1 - sum_{p_r > s} w_r (p_r - s)^(N-1)`.
pub fn cumulative_p(spectrum: &Spectrum, dim: usize, s: f64) -> Result<f64> {
    check(spectrum, dim)?;
    if dim == 1 {
        return Ok(if s >= 1.0 { 1.0 } else { 0.0 });
    }
    let power = (dim - 1) as i32;
    let tail: f64 = lagrange_weights_f64(spectrum)
        .iter()
        .filter(|(p, _)| *p > s)
        .map(|(p, w)| w * (p - s).powi(power))
        .sum();
    Ok((1.0 - tail).clamp(0.0, 1.0))
}

/// `int_0^p (p - s)^(N-2) s ln(s) ds = p^N / (N (N-1)) * (ln p - sum_{k=2}^{N} 1/k)`.
pub fn kernel_integral(p: f64, dim: usize) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidArgument(format!("kernel upper limit {p} outside (0, 1]")));
    }
    if dim < 2 {
        return Err(Error::InvalidArgument("kernel integral needs N >= 2".into()));
    }
    let n = dim as f64;
    Ok(p.powi(dim as i32) / (n * (n - 1.0)) * (p.ln() - s0_exact(dim)))
}

/// Absolute entropy `N int f(s) P(s) ds`, integrated analytically over each
/// piece of `P(s)` with the kernel integral.
pub fn entropy_by_quadrature(spectrum: &Spectrum, dim: usize) -> Result<f64> {
    entropy_by_quadrature_with(spectrum, dim, Precision::Auto)
}

pub fn entropy_by_quadrature_with(spectrum: &Spectrum, dim: usize, precision: Precision) -> Result<f64> {
    check(spectrum, dim)?;
    if dim == 1 {
        return Ok(0.0);
    }
    Ok(match precision {
        Precision::Double => quadrature_terms(&Double, spectrum, dim).0,
        Precision::Extended(digits) => quadrature_terms(&Extended::with_digits(digits), spectrum, dim).0,
        Precision::Auto => {
            let (value, magnitude) = quadrature_terms(&Double, spectrum, dim);
            let error = magnitude * f64::EPSILON * dim as f64;
            if error <= DOUBLE_ERROR_BUDGET {
                value
            } else {
                let amp = (error / DOUBLE_ERROR_BUDGET).log2().max(0.0);
                quadrature_terms(&Extended::with_bits(extended_bits(amp)), spectrum, dim).0
            }
        }
    })
}

/// Returns the sum and the sum of absolute values of its terms.
fn quadrature_terms<A: Arithmetic>(arith: &A, spectrum: &Spectrum, dim: usize) -> (f64, f64) {
    let n = dim as u64;
    // sum_{k=2}^{N} 1/k, accumulated in the working precision
    let harmonic = (2..=n).fold(arith.zero(), |acc, k| acc + arith.one() / arith.int(k));
    let mut total = arith.zero();
    let mut magnitude = 0.0;
    for (p, w) in lagrange_weights(arith, spectrum) {
        // N (N - 1) * kernel(p) = p^N (ln p - H)
        let kernel = arith.powi(&p, dim as u32) * (arith.ln(&p) - harmonic.clone());
        let term = w * kernel;
        magnitude += arith.to_f64(&term).abs();
        total = total + term;
    }
    (-arith.to_f64(&total), magnitude)
}

/// Residuals of the two identities behind the closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    /// `|sum_r p_r^N w_r - 1|`
    pub power_sum: f64,
    /// `|sum_r (s - p_r)^n w_r|` for `n = 0 ..= N - 2`
    pub vanishing_moments: Vec<f64>,
    /// the point `s` the moments were evaluated at
    pub at: f64,
}

impl IdentityResiduals {
    pub fn max_moment(&self) -> f64 {
        self.vanishing_moments.iter().copied().fold(0.0, f64::max)
    }
}

/// Evaluates both identities over all `N` entries, which must be pairwise
/// distinct (a single zero is allowed).
pub fn identity_residuals(spectrum: &Spectrum, dim: usize, at: f64) -> Result<IdentityResiduals> {
    identity_residuals_with(spectrum, dim, at, Precision::Auto)
}

pub fn identity_residuals_with(spectrum: &Spectrum, dim: usize, at: f64, precision: Precision) -> Result<IdentityResiduals> {
    if spectrum.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: spectrum.dim() });
    }
    if let Some(c) = spectrum.clusters().iter().find(|c| c.multiplicity > 1) {
        return Err(Error::DegenerateSpectrum { value: c.value, multiplicity: c.multiplicity });
    }
    match precision {
        Precision::Double => Ok(residuals(&Double, spectrum, at)),
        Precision::Extended(digits) => Ok(residuals(&Extended::with_digits(digits), spectrum, at)),
        Precision::Auto => {
            let nodes = spectrum.nodes();
            let amp = crate::precision::amplification_log2(&nodes);
            Ok(residuals(&Extended::with_bits(extended_bits(amp)), spectrum, at))
        }
    }
}

fn residuals<A: Arithmetic>(arith: &A, spectrum: &Spectrum, at: f64) -> IdentityResiduals {
    let nodes = spectrum.nodes();
    let dim = nodes.len();
    let lifted: Vec<A::Num> = nodes.iter().map(|&p| arith.num(p)).collect();
    let weights: Vec<A::Num> = (0..dim)
        .map(|r| {
            let denom = (0..dim)
                .filter(|&q| q != r)
                .fold(arith.one(), |acc, q| acc * (lifted[r].clone() - lifted[q].clone()));
            arith.one() / denom
        })
        .collect();
    let power = lifted
        .iter()
        .zip(&weights)
        .fold(arith.zero(), |acc, (p, w)| acc + arith.powi(p, dim as u32) * w.clone());
    let s = arith.num(at);
    let vanishing_moments = (0..dim.saturating_sub(1))
        .map(|n| {
            let sum = lifted.iter().zip(&weights).fold(arith.zero(), |acc, (p, w)| {
                acc + arith.powi(&(s.clone() - p.clone()), n as u32) * w.clone()
            });
            arith.to_f64(&sum).abs()
        })
        .collect();
    IdentityResiduals {
        power_sum: (arith.to_f64(&(power - arith.one()))).abs(),
        vanishing_moments,
        at,
    }
}
