//! Excess-versus-von-Neumann tables, subsystem inequalities and the
//! projective-measurement scan.
//!
//! Every randomized trial `t` of a run draws from its own stream
//! `stream.domain(label).fork(t)`, recorded in any certificate it produces, so
//! a single trial can be regenerated without replaying the run.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::entropy::{absolute_entropy, excess_entropy, s0_asymptotic, s0_exact, shannon, uniform_excess, EXCESS_BOUND};
use crate::error::{Error, Result};
use crate::oracle::par_map_ordered;
use crate::rng::RngStream;
use crate::sampling::{haar_unitary, hilbert_schmidt_density, random_spectrum};
use crate::spectrum::Spectrum;
use crate::state::{partial_trace, projective_update, spectrum_of, DensityMatrix, PureState, Subsystem, CVector};

/// Trials with a margin below `-MARGIN_TOLERANCE` are violations.
pub const MARGIN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowLabel {
    Uniform,
    RandomMixture,
}

impl RowLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowLabel::Uniform => "uniform",
            RowLabel::RandomMixture => "random_mixture",
        }
    }
}

/// One point of the `S_F` versus `S_H` plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig1Row {
    pub s_h: f64,
    pub s_f: f64,
    pub label: RowLabel,
    /// number of mixed states for uniform rows
    pub n: Option<usize>,
    pub dim: usize,
}

/// Defaults for the figure reproduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig1Config {
    pub dim: usize,
    pub count: usize,
    pub max_n: usize,
    /// Largest allowed `|s_f - curve(s_h)|` for random rows. Regression bound
    /// recorded from the first default run, not a property of the states.
    pub envelope: f64,
}

impl Default for Fig1Config {
    fn default() -> Self {
        Self { dim: 8, count: 500, max_n: 8, envelope: 0.05 }
    }
}

/// Uniform mixtures `n = 1 ..= max_n`: `(ln n, ln n - sum_{k=2}^{n} 1/k)`.
pub fn fig1_uniform_curve(max_n: usize) -> Result<Vec<Fig1Row>> {
    if max_n < 2 {
        return Err(Error::InvalidArgument(format!("max_n must be at least 2, got {max_n}")));
    }
    Ok((1..=max_n)
        .map(|n| Fig1Row {
            s_h: (n as f64).ln(),
            s_f: uniform_excess(n),
            label: RowLabel::Uniform,
            n: Some(n),
            dim: max_n,
        })
        .collect())
}

/// Random spectra drawn from the flat Dirichlet distribution.
pub fn fig1_random_mixtures(dim: usize, count: usize, stream: RngStream, workers: usize) -> Result<Vec<Fig1Row>> {
    if count < 1 || dim < 1 {
        return Err(Error::InvalidArgument("need dim >= 1 and count >= 1".into()));
    }
    let base = stream.domain("fig1");
    par_map_ordered(count, workers, |i| {
        let mut rng = base.fork(i as u64).rng();
        let spectrum = random_spectrum(dim, &mut rng)?;
        Ok(Fig1Row {
            s_h: shannon(spectrum.values())?,
            s_f: excess_entropy(&spectrum),
            label: RowLabel::RandomMixture,
            n: None,
            dim,
        })
    })
    .into_iter()
    .collect()
}

/// Piecewise-linear interpolation of the uniform curve at `s_h`, extrapolating
/// the last segment beyond its end.
pub fn curve_interpolation(curve: &[Fig1Row], s_h: f64) -> f64 {
    let seg = curve
        .windows(2)
        .find(|w| s_h <= w[1].s_h)
        .unwrap_or_else(|| &curve[curve.len() - 2..]);
    let (a, b) = (&seg[0], &seg[1]);
    a.s_f + (b.s_f - a.s_f) * (s_h - a.s_h) / (b.s_h - a.s_h)
}

/// Largest `|s_f - curve(s_h)|` over the given rows.
pub fn envelope_deviation(curve: &[Fig1Row], rows: &[Fig1Row]) -> f64 {
    rows.iter()
        .map(|r| (r.s_f - curve_interpolation(curve, r.s_h)).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsetRow {
    pub dim: usize,
    pub s0_exact: f64,
    pub s0_asymptotic: f64,
    /// `s0_exact - s0_asymptotic`
    pub gap: f64,
    /// false for `N = 1`, where the expansion is meaningless
    pub in_asymptotic_range: bool,
}

/// `S0(N)` and its three-term asymptotic for `N = 1 ..= max_dim`.
pub fn fig1_inset(max_dim: usize) -> Result<Vec<InsetRow>> {
    if max_dim < 2 {
        return Err(Error::InvalidArgument(format!("max_dim must be at least 2, got {max_dim}")));
    }
    Ok((1..=max_dim)
        .map(|n| {
            let exact = s0_exact(n);
            let asym = s0_asymptotic(n);
            InsetRow { dim: n, s0_exact: exact, s0_asymptotic: asym, gap: exact - asym, in_asymptotic_range: n >= 2 }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    /// reduced state has lower absolute entropy
    Ei1,
    /// absolute entropy is superadditive on product states
    Ei2,
    /// excess entropy is subadditive
    Ei3,
    /// `S0(NM) > S0(N) + S0(M)`
    Ei3a,
    /// harmonic-sum inequality used for uniform product states
    HarmonicChain,
    /// projective measurement does not lower the absolute entropy
    MeasurementMonotonicity,
}

impl InequalityId {
    pub fn as_str(&self) -> &'static str {
        match self {
            InequalityId::Ei1 => "ei1",
            InequalityId::Ei2 => "ei2",
            InequalityId::Ei3 => "ei3",
            InequalityId::Ei3a => "ei3a",
            InequalityId::HarmonicChain => "harmonic_chain",
            InequalityId::MeasurementMonotonicity => "measurement_monotonicity",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ei1" => InequalityId::Ei1,
            "ei2" => InequalityId::Ei2,
            "ei3" => InequalityId::Ei3,
            "ei3a" => InequalityId::Ei3a,
            "harmonic_chain" => InequalityId::HarmonicChain,
            "measurement_monotonicity" | "measurement" => InequalityId::MeasurementMonotonicity,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Random,
    Product,
    Correlated,
    Arithmetic,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Random => "random",
            Family::Product => "product",
            Family::Correlated => "correlated",
            Family::Arithmetic => "arithmetic",
        }
    }
}

/// Everything needed to re-run and inspect one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub id: InequalityId,
    pub family: Family,
    pub dims: (usize, usize),
    pub trial: u64,
    /// stream the trial drew from
    pub stream: RngStream,
    /// larger side of the inequality as stated
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`; negative means the inequality failed
    pub margin: f64,
    /// eigenvalues of the states involved, global state first
    pub spectra: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub id: InequalityId,
    pub family: Family,
    pub dims: (usize, usize),
    pub trials: usize,
    pub violations: usize,
    pub worst_margin: f64,
    /// whether a violation is a failure (true) or a finding (false)
    pub asserted: bool,
    pub worst: Option<Certificate>,
    pub certificates: Vec<Certificate>,
}

impl InequalityReport {
    fn from_outcomes(
        id: InequalityId,
        family: Family,
        dims: (usize, usize),
        asserted: bool,
        outcomes: Vec<Certificate>,
    ) -> Self {
        let trials = outcomes.len();
        let worst = outcomes
            .iter()
            .min_by(|a, b| a.margin.total_cmp(&b.margin))
            .cloned();
        let certificates: Vec<Certificate> = outcomes.into_iter().filter(|c| c.margin < -MARGIN_TOLERANCE).collect();
        Self {
            id,
            family,
            dims,
            trials,
            violations: certificates.len(),
            worst_margin: worst.as_ref().map_or(f64::INFINITY, |c| c.margin),
            asserted,
            worst,
            certificates,
        }
    }

    pub fn failed(&self) -> bool {
        self.asserted && self.violations > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub trials: usize,
    pub dims: Vec<(usize, usize)>,
    /// `ei3a` and the harmonic chain run over `2 ..= grid_max` in each factor
    pub grid_max: usize,
    pub ids: Vec<InequalityId>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            dims: vec![(2, 2), (2, 3), (3, 3)],
            grid_max: 8,
            ids: vec![
                InequalityId::Ei1,
                InequalityId::Ei2,
                InequalityId::Ei3,
                InequalityId::Ei3a,
                InequalityId::HarmonicChain,
            ],
        }
    }
}

fn absolute(spectrum: &Spectrum) -> Result<f64> {
    absolute_entropy(spectrum, spectrum.dim()).map(|r| r.s_total)
}

/// Spectrum of `a (x) b` from the factor spectra.
fn product_spectrum(a: &Spectrum, b: &Spectrum) -> Result<Spectrum> {
    let values = a
        .values()
        .iter()
        .flat_map(|&x| b.values().iter().map(move |&y| x * y))
        .collect();
    Spectrum::with_tolerance(values, a.cluster_tolerance())
}

fn stream_for(base: RngStream, id: InequalityId, family: Family, dims: (usize, usize), trial: u64) -> RngStream {
    base.domain(&format!("{}/{}/{}x{}", id.as_str(), family.as_str(), dims.0, dims.1)).fork(trial)
}

/// Runs one randomized trial from its own stream. Used by the suites and to
/// re-verify certificates.
pub fn run_trial(id: InequalityId, family: Family, dims: (usize, usize), trial: u64, stream: RngStream) -> Result<Certificate> {
    let (n, m) = dims;
    let mut rng = stream.rng();
    let cert = |lhs: f64, rhs: f64, spectra: Vec<Vec<f64>>| Certificate {
        id,
        family,
        dims,
        trial,
        stream,
        lhs,
        rhs,
        margin: lhs - rhs,
        spectra,
    };
    match (id, family) {
        (InequalityId::Ei1, _) => {
            let rho = hilbert_schmidt_density(n * m, &mut rng)?;
            let s = spectrum_of(&rho)?;
            let sa = spectrum_of(&partial_trace(&rho, dims, Subsystem::A)?)?;
            let sb = spectrum_of(&partial_trace(&rho, dims, Subsystem::B)?)?;
            let whole = absolute(&s)?;
            let larger = absolute(&sa)?.max(absolute(&sb)?);
            Ok(cert(whole, larger, vec![s.values().to_vec(), sa.values().to_vec(), sb.values().to_vec()]))
        }
        (InequalityId::Ei2, _) => {
            let a = spectrum_of(&hilbert_schmidt_density(n, &mut rng)?)?;
            let b = spectrum_of(&hilbert_schmidt_density(m, &mut rng)?)?;
            let ab = product_spectrum(&a, &b)?;
            let lhs = absolute(&ab)?;
            let rhs = absolute(&a)? + absolute(&b)?;
            Ok(cert(lhs, rhs, vec![ab.values().to_vec(), a.values().to_vec(), b.values().to_vec()]))
        }
        (InequalityId::Ei3, Family::Product) => {
            let a = spectrum_of(&hilbert_schmidt_density(n, &mut rng)?)?;
            let b = spectrum_of(&hilbert_schmidt_density(m, &mut rng)?)?;
            let ab = product_spectrum(&a, &b)?;
            let lhs = excess_entropy(&a) + excess_entropy(&b);
            let rhs = excess_entropy(&ab);
            Ok(cert(lhs, rhs, vec![ab.values().to_vec(), a.values().to_vec(), b.values().to_vec()]))
        }
        (InequalityId::Ei3, _) => {
            let rho = hilbert_schmidt_density(n * m, &mut rng)?;
            let s = spectrum_of(&rho)?;
            let sa = spectrum_of(&partial_trace(&rho, dims, Subsystem::A)?)?;
            let sb = spectrum_of(&partial_trace(&rho, dims, Subsystem::B)?)?;
            let lhs = excess_entropy(&sa) + excess_entropy(&sb);
            let rhs = excess_entropy(&s);
            Ok(cert(lhs, rhs, vec![s.values().to_vec(), sa.values().to_vec(), sb.values().to_vec()]))
        }
        (InequalityId::MeasurementMonotonicity, _) => {
            let rho = hilbert_schmidt_density(n, &mut rng)?;
            let basis = haar_unitary(n, &mut rng)?;
            let sigma = projective_update(&rho, &basis.rank_one_projectors())?;
            let s_rho = spectrum_of(&rho)?;
            let s_sigma = spectrum_of(&sigma)?;
            let lhs = absolute(&s_sigma)?;
            let rhs = absolute(&s_rho)?;
            Ok(cert(lhs, rhs, vec![s_rho.values().to_vec(), s_sigma.values().to_vec()]))
        }
        (InequalityId::Ei3a, _) | (InequalityId::HarmonicChain, _) => Err(Error::InvalidArgument(format!(
            "{} is deterministic and has no random trials",
            id.as_str()
        ))),
    }
}

/// Regenerates a certificate's trial from its recorded stream.
pub fn reverify(certificate: &Certificate) -> Result<Certificate> {
    run_trial(certificate.id, certificate.family, certificate.dims, certificate.trial, certificate.stream)
}

fn randomized(
    id: InequalityId,
    family: Family,
    dims: (usize, usize),
    trials: usize,
    asserted: bool,
    stream: RngStream,
    workers: usize,
) -> Result<InequalityReport> {
    let outcomes: Result<Vec<Certificate>> = par_map_ordered(trials, workers, |t| {
        let t = t as u64;
        run_trial(id, family, dims, t, stream_for(stream, id, family, dims, t))
    })
    .into_iter()
    .collect();
    Ok(InequalityReport::from_outcomes(id, family, dims, asserted, outcomes?))
}

/// `S0(NM) - S0(N) - S0(M)` over `2 <= N, M <= grid_max`.
pub fn ei3a_report(grid_max: usize) -> InequalityReport {
    let mut outcomes = Vec::new();
    for n in 2..=grid_max {
        for m in 2..=grid_max {
            let lhs = s0_exact(n * m);
            let rhs = s0_exact(n) + s0_exact(m);
            outcomes.push(Certificate {
                id: InequalityId::Ei3a,
                family: Family::Arithmetic,
                dims: (n, m),
                trial: outcomes.len() as u64,
                stream: RngStream::new(0, 0),
                lhs,
                rhs,
                margin: lhs - rhs,
                spectra: Vec::new(),
            });
        }
    }
    InequalityReport::from_outcomes(InequalityId::Ei3a, Family::Arithmetic, (grid_max, grid_max), true, outcomes)
}

/// `sum_{k=nm+1}^{NM} 1/k >= sum_{k=n+1}^{N} 1/k + sum_{k=m+1}^{M} 1/k` for
/// `2 <= n <= N <= grid_max`, `2 <= m <= M <= grid_max`. Each case also
/// checks the regrouping of the left side into the two double sums.
pub fn harmonic_chain_report(grid_max: usize) -> InequalityReport {
    use crate::entropy::harmonic_range;
    let mut outcomes = Vec::new();
    for big_n in 2..=grid_max {
        for n in 2..=big_n {
            for big_m in 2..=grid_max {
                for m in 2..=big_m {
                    let lhs = harmonic_range(n * m + 1, big_n * big_m);
                    let regrouped: f64 = (n + 1..=big_n)
                        .flat_map(|k1| (0..m).map(move |l1| 1.0 / (k1 * m - l1) as f64))
                        .chain((m + 1..=big_m).flat_map(|k2| (0..big_n).map(move |l2| 1.0 / (k2 * big_n - l2) as f64)))
                        .sum();
                    let rhs = harmonic_range(n + 1, big_n) + harmonic_range(m + 1, big_m);
                    let margin = if (lhs - regrouped).abs() > 1e-12 { f64::NEG_INFINITY } else { lhs - rhs };
                    outcomes.push(Certificate {
                        id: InequalityId::HarmonicChain,
                        family: Family::Arithmetic,
                        dims: (big_n, big_m),
                        trial: outcomes.len() as u64,
                        stream: RngStream::new(0, 0),
                        lhs,
                        rhs,
                        margin,
                        spectra: vec![vec![n as f64, m as f64]],
                    });
                }
            }
        }
    }
    InequalityReport::from_outcomes(
        InequalityId::HarmonicChain,
        Family::Arithmetic,
        (grid_max, grid_max),
        true,
        outcomes,
    )
}

/// Runs the configured inequality checks. `ei3` runs on product states
/// (asserted) and on correlated states (reported only).
pub fn inequality_suite(config: &SuiteConfig, stream: RngStream, workers: usize) -> Result<Vec<InequalityReport>> {
    for &(n, m) in &config.dims {
        if n < 2 || m < 2 {
            return Err(Error::InvalidArgument(format!("subsystem dims must be >= 2, got ({n}, {m})")));
        }
    }
    let mut out = Vec::new();
    for &id in &config.ids {
        match id {
            InequalityId::Ei1 => {
                for &d in &config.dims {
                    out.push(randomized(id, Family::Random, d, config.trials, true, stream, workers)?);
                }
            }
            InequalityId::Ei2 => {
                for &d in &config.dims {
                    out.push(randomized(id, Family::Product, d, config.trials, true, stream, workers)?);
                }
            }
            InequalityId::Ei3 => {
                for &d in &config.dims {
                    out.push(randomized(id, Family::Product, d, config.trials, true, stream, workers)?);
                    out.push(randomized(id, Family::Correlated, d, config.trials, false, stream, workers)?);
                }
            }
            InequalityId::Ei3a => out.push(ei3a_report(config.grid_max)),
            InequalityId::HarmonicChain => out.push(harmonic_chain_report(config.grid_max)),
            InequalityId::MeasurementMonotonicity => {
                for &(n, _) in &config.dims {
                    out.push(measurement_conjecture_scan(config.trials, n, stream, workers)?);
                }
            }
        }
    }
    Ok(out)
}

/// Compares `S[sum_i P_i rho P_i]` with `S[rho]` for random states and random
/// complete rank-1 projector sets. Violations are findings, not failures.
pub fn measurement_conjecture_scan(trials: usize, dim: usize, stream: RngStream, workers: usize) -> Result<InequalityReport> {
    if trials < 1 || dim < 1 {
        return Err(Error::InvalidArgument("need trials >= 1 and dim >= 1".into()));
    }
    randomized(InequalityId::MeasurementMonotonicity, Family::Random, (dim, 1), trials, false, stream, workers)
}

/// Two spins in the singlet state: `(S[reduced], S[global])`.
pub fn singlet_instance() -> Result<(f64, f64)> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = CVector::from_vec(vec![0.0, h, -h, 0.0].into_iter().map(|x| num_complex::Complex64::new(x, 0.0)).collect());
    let rho = DensityMatrix::from(&PureState::new(amps)?);
    let sigma = partial_trace(&rho, (2, 2), Subsystem::A)?;
    Ok((absolute(&spectrum_of(&sigma)?)?, absolute(&spectrum_of(&rho)?)?))
}

/// Checks a Fig. 1 row against the universal bound.
pub fn within_excess_bound(row: &Fig1Row) -> bool {
    row.s_f < EXCESS_BOUND
}

pub fn fig1_csv(rows: &[Fig1Row]) -> String {
    let mut out = String::from("label,n,dim,s_h,s_f\n");
    for r in rows {
        let n = r.n.map(|n| n.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{},{}", r.label.as_str(), n, r.dim, r.s_h, r.s_f);
    }
    out
}

pub fn inset_csv(rows: &[InsetRow]) -> String {
    let mut out = String::from("dim,s0_exact,s0_asymptotic,gap,in_asymptotic_range\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.dim, r.s0_exact, r.s0_asymptotic, r.gap, r.in_asymptotic_range);
    }
    out
}

pub fn reports_csv(reports: &[InequalityReport]) -> String {
    let mut out = String::from("id,family,dims,trials,violations,worst_margin,asserted\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{}x{},{},{},{},{}",
            r.id.as_str(),
            r.family.as_str(),
            r.dims.0,
            r.dims.1,
            r.trials,
            r.violations,
            r.worst_margin,
            r.asserted
        );
    }
    out
}

/// Human-readable summary, one line per report plus one per certificate.
pub fn reports_summary(reports: &[InequalityReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let status = match (r.violations, r.asserted) {
            (0, _) => "ok",
            (_, true) => "VIOLATED",
            (_, false) => "finding",
        };
        let _ = writeln!(
            out,
            "{:<26} {:<10} {}x{:<3} trials={:<6} violations={:<4} worst_margin={:.6e} [{}]",
            r.id.as_str(),
            r.family.as_str(),
            r.dims.0,
            r.dims.1,
            r.trials,
            r.violations,
            r.worst_margin,
            status
        );
        for c in &r.certificates {
            let _ = writeln!(
                out,
                "  certificate trial={} seed={:#x} stream={} lhs={} rhs={} margin={:e}",
                c.trial, c.stream.seed, c.stream.stream_id, c.lhs, c.rhs, c.margin
            );
        }
    }
    out
}
