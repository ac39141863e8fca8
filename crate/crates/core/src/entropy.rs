//! Closed-form entropies: Shannon, von Neumann, conditional, the minimum
//! uncertainty entropy `S0(N)`, the excess entropy `F` and their sum.
//!
//! All values are in nats.

use serde::{Deserialize, Serialize};

use crate::divdiff::divided_difference;
use crate::error::{Error, Result};
use crate::precision::{amplification_log2, Arithmetic, Double, Extended, Precision};
use crate::spectrum::{Spectrum, SUM_TOLERANCE};
use crate::state::{spectrum_of, DensityMatrix, MeasurementBasis};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Supremum of the excess entropy.
pub const EXCESS_BOUND: f64 = 1.0 - EULER_GAMMA;

/// Largest divided-difference order evaluated in doubles under [`Precision::Auto`].
pub const MAX_DOUBLE_ORDER: usize = 25;
/// Smallest relative cluster gap evaluated in doubles under [`Precision::Auto`].
pub const MIN_DOUBLE_GAP: f64 = 1e-4;
/// Largest tolerated rounding amplification (log2) for doubles under [`Precision::Auto`].
pub const MAX_DOUBLE_AMPLIFICATION: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

/// The entropies of one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub dim: usize,
    /// von Neumann entropy
    pub s_h: f64,
    /// minimum uncertainty entropy `S0(N)`
    pub s0: f64,
    /// excess statistical entropy `F`
    pub s_f: f64,
    /// absolute entropy `S0(N) + F`
    pub s_total: f64,
    pub method: Method,
}

/// `-sum p ln p` with `0 ln 0 = 0`.
fn entropy_terms(probs: &[f64]) -> f64 {
    -probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>()
}

/// `f(s) = -s ln s`, with `f(0) = 0`.
pub fn f_weight(s: f64) -> f64 {
    if s > 0.0 {
        -s * s.ln()
    } else {
        0.0
    }
}

pub fn shannon(probs: &[f64]) -> Result<f64> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution("empty distribution".into()));
    }
    if let Some(p) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
        return Err(Error::InvalidDistribution(format!("invalid probability {p}")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("probabilities sum to {sum}")));
    }
    Ok(entropy_terms(probs).max(0.0))
}

pub fn von_neumann(rho: &DensityMatrix) -> Result<f64> {
    Ok(von_neumann_of(&spectrum_of(rho)?))
}

pub fn von_neumann_of(spectrum: &Spectrum) -> f64 {
    entropy_terms(spectrum.values()).max(0.0)
}

/// Shannon entropy of the outcome distribution `<a|rho|a>` in `basis`.
pub fn conditional_entropy(rho: &DensityMatrix, basis: &MeasurementBasis) -> Result<f64> {
    let probs = rho.outcome_probabilities(basis)?;
    Ok(entropy_terms(&probs).max(0.0))
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// `sum_{k=from}^{to} 1/k`, zero when `from > to`.
pub fn harmonic_range(from: usize, to: usize) -> f64 {
    let from = from.max(1);
    if from > to {
        return 0.0;
    }
    // smallest terms first
    compensated_sum((from..=to).rev().map(|k| 1.0 / k as f64))
}

/// Minimum uncertainty entropy `S0(N) = sum_{k=2}^{N} 1/k`.
pub fn s0_exact(dim: usize) -> f64 {
    harmonic_range(2, dim)
}

/// `ln N - (1 - gamma) + 1/(2N)`.
pub fn s0_asymptotic(dim: usize) -> f64 {
    let n = dim as f64;
    n.ln() - EXCESS_BOUND + 0.5 / n
}

/// `ln n - sum_{k=2}^{n} 1/k`: excess entropy of a uniform mixture of `n` states.
pub fn uniform_excess(n: usize) -> f64 {
    (n as f64).ln() - s0_exact(n)
}

/// Excess entropy of two distinct non-zero weights.
pub fn two_level_excess(p1: f64, p2: f64) -> f64 {
    -(p1 * p1 * f_ln(p1) - p2 * p2 * f_ln(p2)) / (p1 - p2)
}

fn f_ln(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        0.0
    }
}

/// Excess statistical entropy `F` with fast paths for uniform mixtures and two
/// distinct weights.
pub fn excess_entropy(spectrum: &Spectrum) -> f64 {
    excess_entropy_with(spectrum, Precision::Auto)
}

pub fn excess_entropy_with(spectrum: &Spectrum, precision: Precision) -> f64 {
    let nonzero: Vec<_> = spectrum.nonzero_clusters().copied().collect();
    match nonzero.as_slice() {
        [only] if only.multiplicity == 1 => 0.0,
        [only] => uniform_excess(only.multiplicity),
        [a, b] if a.multiplicity == 1
            && b.multiplicity == 1
            && (a.value - b.value) >= MIN_DOUBLE_GAP * a.value =>
        {
            two_level_excess(a.value, b.value)
        }
        _ => excess_entropy_divided_difference(spectrum, precision),
    }
}

/// `F = -[p_1, ..., p_N] g` with `g(x) = x^N ln x`, evaluated on the full node
/// list (zeros included) with confluent entries for every cluster.
pub fn excess_entropy_divided_difference(spectrum: &Spectrum, precision: Precision) -> f64 {
    let nodes = spectrum.nodes();
    let clusters: Vec<(f64, usize)> = spectrum.clusters().iter().map(|c| (c.value, c.multiplicity)).collect();
    let order = nodes.len() - 1;
    let amp = amplification_log2(&nodes);
    let value = match precision {
        Precision::Double => excess_dd(&Double, &clusters, nodes.len()),
        Precision::Extended(digits) => {
            let e = Extended::with_digits(digits);
            let e = Extended::with_bits(e.bits().max(extended_bits(amp)));
            excess_dd(&e, &clusters, nodes.len())
        }
        Precision::Auto => {
            let double_ok = order <= MAX_DOUBLE_ORDER
                && spectrum.min_relative_gap() >= MIN_DOUBLE_GAP
                && amp <= MAX_DOUBLE_AMPLIFICATION;
            if double_ok {
                excess_dd(&Double, &clusters, nodes.len())
            } else {
                excess_dd(&Extended::with_bits(extended_bits(amp)), &clusters, nodes.len())
            }
        }
    };
    // F is non-negative; tiny negatives are rounding
    if value < 0.0 && value > -1e-14 {
        0.0
    } else {
        value
    }
}

/// Working width for a table whose rounding errors can grow by `2^amp`.
pub(crate) fn extended_bits(amp: f64) -> usize {
    (amp.ceil() as usize + 128).min(1 << 14)
}

fn excess_dd<A: Arithmetic>(arith: &A, clusters: &[(f64, usize)], dim: usize) -> f64 {
    let n = dim as u64;
    // binom[k] = C(N, k); hdiff[k] = H_N - H_{N-k}
    let mut binom = Vec::with_capacity(dim + 1);
    let mut hdiff = Vec::with_capacity(dim + 1);
    binom.push(arith.one());
    hdiff.push(arith.zero());
    for k in 1..=n {
        let b = binom[k as usize - 1].clone() * arith.int(n - k + 1) / arith.int(k);
        let h = hdiff[k as usize - 1].clone() + arith.one() / arith.int(n - k + 1);
        binom.push(b);
        hdiff.push(h);
    }
    let logs: Vec<Option<A::Num>> = clusters
        .iter()
        .map(|&(x, _)| if x > 0.0 { Some(arith.ln(&arith.num(x))) } else { None })
        .collect();

    let dd = divided_difference(arith, clusters, |c, x, k| match &logs[c] {
        None => arith.zero(),
        Some(lnx) => {
            let pow = arith.powi(x, (dim - k) as u32);
            binom[k].clone() * pow * (lnx.clone() + hdiff[k].clone())
        }
    });
    -arith.to_f64(&dd)
}

/// `S0(N) + F` for a spectrum with exactly `dim` entries.
pub fn absolute_entropy(spectrum: &Spectrum, dim: usize) -> Result<EntropyReport> {
    absolute_entropy_with(spectrum, dim, Precision::Auto)
}

pub fn absolute_entropy_with(spectrum: &Spectrum, dim: usize, precision: Precision) -> Result<EntropyReport> {
    if spectrum.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: spectrum.dim() });
    }
    let s0 = s0_exact(dim);
    let s_f = excess_entropy_with(spectrum, precision);
    Ok(EntropyReport {
        dim,
        s_h: von_neumann_of(spectrum),
        s0,
        s_f,
        s_total: s0 + s_f,
        method: Method::ClosedForm,
    })
}

/// Closed-form report for a density matrix.
pub fn entropy_report(rho: &DensityMatrix) -> Result<EntropyReport> {
    let spectrum = spectrum_of(rho)?;
    absolute_entropy(&spectrum, rho.dim())
}

/// Absolute entropy `S[rho]` of a density matrix.
pub fn absolute_entropy_of(rho: &DensityMatrix) -> Result<f64> {
    entropy_report(rho).map(|r| r.s_total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{validate_density, CMatrix};
    use num_complex::Complex64;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon(&[1.0, 0.0]).unwrap(), 0.0);
        assert!((shannon(&[0.25; 4]).unwrap() - 4f64.ln()).abs() < 1e-15);
        let direct = -0.75 * 0.75f64.ln() - 0.25 * 0.25f64.ln();
        assert!((shannon(&[0.75, 0.25]).unwrap() - direct).abs() < 1e-16);
        assert!((direct - 0.562_335_1).abs() < 1e-7);
        assert!(shannon(&[0.5, 0.6]).is_err());
        assert!(shannon(&[1.5, -0.5]).is_err());
    }

    #[test]
    fn conditional_entropy_rotated_basis() {
        let rho = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(h, 0.0), Complex64::new(h, 0.0), Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
        );
        let basis = MeasurementBasis::from_unitary(u).unwrap();
        assert!((conditional_entropy(&rho, &basis).unwrap() - 2f64.ln()).abs() < 1e-15);
        let diag = DensityMatrix::diagonal(&[0.6, 0.3, 0.1]).unwrap();
        let vn = von_neumann(&diag).unwrap();
        let ce = conditional_entropy(&diag, &MeasurementBasis::identity(3)).unwrap();
        assert!((vn - ce).abs() < 1e-15);
        assert!(conditional_entropy(&diag, &MeasurementBasis::identity(2)).is_err());
    }

    #[test]
    fn s0_examples() {
        assert_eq!(s0_exact(1), 0.0);
        assert_eq!(s0_exact(2), 0.5);
        assert!((s0_exact(4) - 13.0 / 12.0).abs() < 1e-16);
        let expect = 2f64.ln() - (1.0 - EULER_GAMMA) + 0.25;
        assert_eq!(s0_asymptotic(2), expect);
        assert!((s0_asymptotic(2) - 0.520_362_845_461_478).abs() < 1e-14);
        assert!((s0_asymptotic(100) - s0_exact(100)).abs() < 2e-5);
    }

    #[test]
    fn excess_examples() {
        assert_eq!(excess_entropy(&spec(&[1.0, 0.0, 0.0])), 0.0);
        let half = excess_entropy(&spec(&[0.5, 0.5]));
        assert!((half - (2f64.ln() - 0.5)).abs() < 1e-15);
        assert!((half - 0.193_147_2).abs() < 1e-7);

        let direct = -(0.75f64.powi(2) * 0.75f64.ln() - 0.25f64.powi(2) * 0.25f64.ln()) / 0.5;
        let f = excess_entropy(&spec(&[0.75, 0.25]));
        assert!((f - direct).abs() < 1e-15);
        assert!((f - 0.150_355_536_368_267).abs() < 1e-14);

        let padded = excess_entropy(&spec(&[0.7, 0.3, 0.0]));
        assert!((padded - excess_entropy(&spec(&[0.7, 0.3]))).abs() < 1e-15);
    }

    #[test]
    fn divided_difference_matches_fast_paths() {
        for p in [[0.75, 0.25], [0.6, 0.4], [0.99, 0.01]] {
            let s = spec(&p);
            for prec in [Precision::Double, Precision::Extended(50)] {
                let dd = excess_entropy_divided_difference(&s, prec);
                assert!((dd - two_level_excess(p[0], p[1])).abs() < 1e-13, "{p:?} {prec:?}");
            }
        }
        let s = spec(&[0.7, 0.3, 0.0, 0.0]);
        let dd = excess_entropy_divided_difference(&s, Precision::Double);
        assert!((dd - two_level_excess(0.7, 0.3)).abs() < 1e-14);
    }

    #[test]
    fn confluent_uniform_clusters() {
        for n in 2..=20 {
            let s = Spectrum::uniform(n, n).unwrap();
            let dd = excess_entropy_divided_difference(&s, Precision::Double);
            assert!((dd - uniform_excess(n)).abs() < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn mixed_multiplicities_agree_with_near_confluent_limit() {
        // (0.4, 0.4, 0.2) is the limit of (0.4 + h, 0.4 - h, 0.2)
        let exact = excess_entropy(&spec(&[0.4, 0.4, 0.2]));
        let h = 1e-7;
        let near = excess_entropy_with(&spec(&[0.4 + h, 0.4 - h, 0.2]), Precision::Extended(60));
        assert!((exact - near).abs() < 1e-12, "{exact} vs {near}");
    }

    #[test]
    fn absolute_examples() {
        let r = absolute_entropy(&Spectrum::uniform(3, 3).unwrap(), 3).unwrap();
        assert!((r.s_total - 3f64.ln()).abs() < 1e-15);
        let r = absolute_entropy(&Spectrum::pure(2).unwrap(), 2).unwrap();
        assert_eq!(r.s_total, 0.5);
        let r = absolute_entropy(&Spectrum::uniform(2, 4).unwrap(), 4).unwrap();
        let expect = 2f64.ln() + 1.0 / 3.0 + 0.25;
        assert!((r.s_total - expect).abs() < 1e-15);
        assert!((r.s_total - 1.276_480_5).abs() < 1e-7);
        assert!(matches!(
            absolute_entropy(&Spectrum::pure(2).unwrap(), 3),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn report_for_matrix() {
        let rho = validate_density(CMatrix::from_fn(2, 2, |_, _| Complex64::new(0.5, 0.0))).unwrap();
        let r = entropy_report(&rho).unwrap();
        assert!(r.s_h.abs() < 1e-12);
        assert!(r.s_f.abs() < 1e-12);
        assert!((r.s_total - 0.5).abs() < 1e-12);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let terms = [1.0, 1e-16, 1e-16, 1e-16, 1e-16];
        assert_eq!(terms.iter().sum::<f64>(), 1.0);
        assert!(compensated_sum(terms) > 1.0);
    }
}
