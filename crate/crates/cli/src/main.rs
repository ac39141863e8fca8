//! `qent`: absolute entropy of quantum states from the command line.
//!
//! Exit codes: 0 success, 2 unparseable input, 3 invalid state or argument,
//! 4 an asserted inequality was violated, 5 degenerate spectrum where distinct
//! eigenvalues are required.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use qent_core::density::{density_curve, entropy_by_quadrature};
use qent_core::entropy::{absolute_entropy, EntropyReport};
use qent_core::experiments::{
    fig1_csv, fig1_inset, fig1_random_mixtures, fig1_uniform_curve, inequality_suite, inset_csv,
    reports_csv, reports_summary, Fig1Config, InequalityId, SuiteConfig,
};
use qent_core::io::{looks_like_matrix, parse_spectrum, read_density, write_density, write_spectrum, ParseError};
use qent_core::oracle::{mc_entropy_estimate, mc_entropy_from_spectrum, SamplingMode};
use qent_core::sampling::{hilbert_schmidt_density, random_pure_state, random_spectrum};
use qent_core::state::spectrum_of;
use qent_core::{perturb_spectrum, DensityMatrix, RngStream, Spectrum, DEFAULT_SEED};

const SEED_ENV: &str = "QENT_SEED";

#[derive(Debug, Parser)]
#[command(name = "qent", version, about = "Basis-averaged (absolute) entropy of quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// RNG seed (decimal or 0x-hex); falls back to $QENT_SEED, then 0x5EED
    #[arg(long, global = true, env = SEED_ENV, value_parser = parse_seed)]
    seed: Option<u64>,
    /// Draw a fresh seed from the OS when no seed is given
    #[arg(long, global = true)]
    nondeterministic: bool,
    /// Worker threads; never changes results
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Significant digits for printed entropies
    #[arg(long, global = true, default_value_t = 12)]
    precision: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Report entropies in bits instead of nats
    #[arg(long, global = true)]
    bits: bool,
    /// Write the main output here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Sphere,
    Basis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// Hilbert-Schmidt random density matrix
    Mixed,
    /// Haar-random pure state
    Pure,
    /// Flat-Dirichlet spectrum
    Spectrum,
}

#[derive(Debug, Args)]
struct Input {
    /// Matrix (JSON) or spectrum file; `-` reads stdin
    #[arg(long, conflicts_with = "spectrum")]
    input: Option<PathBuf>,
    /// Inline spectrum, e.g. "0.75 0.25"
    #[arg(long)]
    spectrum: Option<String>,
    /// Hilbert-space dimension; a shorter spectrum is padded with zeros
    #[arg(long)]
    dim: Option<usize>,
    /// Split degenerate eigenvalues by this spacing before evaluating
    #[arg(long)]
    perturb: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// S_H, S0(N), S_F and S by closed form
    Entropy {
        #[command(flatten)]
        input: Input,
        /// Also evaluate by piecewise quadrature (distinct eigenvalues only)
        #[arg(long)]
        quadrature: bool,
    },
    /// Monte-Carlo estimate of S over random bases
    Mc {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Mode::Sphere)]
        mode: Mode,
    },
    /// CSV of the outcome-weight density P(s)
    Pdensity {
        #[command(flatten)]
        input: Input,
        /// Number of grid points over [0, 1]
        #[arg(long, default_value_t = 101)]
        bins: usize,
    },
    /// S_F versus S_H: uniform mixtures and random mixtures
    Fig1 {
        #[arg(long, default_value_t = Fig1Config::default().dim)]
        dim: usize,
        /// Number of random mixtures
        #[arg(long, default_value_t = Fig1Config::default().count)]
        samples: usize,
        #[arg(long, default_value_t = Fig1Config::default().max_n)]
        max_n: usize,
    },
    /// S0(N) against its asymptotic form
    Inset {
        #[arg(long, default_value_t = 50)]
        max_n: usize,
    },
    /// Run inequality checks
    Check {
        /// Comma-separated ids: ei1, ei2, ei3, ei3a, harmonic_chain, measurement
        #[arg(long, value_delimiter = ',', default_values_t = default_ids())]
        ids: Vec<String>,
        #[arg(long, default_value_t = SuiteConfig::default().trials)]
        trials: usize,
        /// Subsystem dimensions, e.g. 2x2,2x3
        #[arg(long, value_delimiter = ',', value_parser = parse_dims, default_values = ["2x2", "2x3", "3x3"])]
        dims: Vec<(usize, usize)>,
        /// Largest factor for the arithmetic checks
        #[arg(long, default_value_t = SuiteConfig::default().grid_max)]
        grid: usize,
    },
    /// Write a random state as a matrix or spectrum file
    RandomState {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = Kind::Mixed)]
        kind: Kind,
    },
    /// Split degenerate eigenvalues of a spectrum
    Perturb {
        #[command(flatten)]
        input: Input,
    },
}

fn default_ids() -> Vec<String> {
    SuiteConfig::default().ids.iter().map(|id| id.as_str().to_string()).collect()
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("bad seed {s:?}: {e}"))
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NxM, got {s:?}"))?;
    let n = a.trim().parse().map_err(|_| format!("bad dimension in {s:?}"))?;
    let m = b.trim().parse().map_err(|_| format!("bad dimension in {s:?}"))?;
    Ok((n, m))
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qent_core::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Parse(_) => 2,
            CliError::Core(qent_core::Error::DegenerateSpectrum { .. }) => 5,
            CliError::Core(_) | CliError::Usage(_) => 3,
        }
    }

    fn hint(&self) -> Option<&'static str> {
        match self {
            CliError::Core(qent_core::Error::DegenerateSpectrum { .. }) => {
                Some("hint: split the eigenvalues with `--perturb <epsilon>` or use the `mc` command")
            }
            _ => None,
        }
    }
}

/// Parsed state: a matrix when one was given, and its spectrum padded to `dim`.
struct State {
    matrix: Option<DensityMatrix>,
    spectrum: Spectrum,
}

impl Input {
    fn load(&self) -> Result<State, CliError> {
        let (matrix, mut spectrum) = match (&self.input, &self.spectrum) {
            (_, Some(inline)) => (None, Spectrum::new(parse_spectrum(inline)?)?),
            (Some(path), None) => {
                let text = read_text(path)?;
                if looks_like_matrix(&text) {
                    let rho = read_density(&text)??;
                    let spectrum = spectrum_of(&rho)?;
                    (Some(rho), spectrum)
                } else {
                    (None, Spectrum::new(parse_spectrum(&text)?)?)
                }
            }
            (None, None) => return Err(CliError::Usage("give --input FILE or --spectrum VALUES".into())),
        };
        if let Some(dim) = self.dim {
            if matrix.as_ref().is_some_and(|m| m.dim() != dim) {
                return Err(qent_core::Error::DimensionMismatch { expected: dim, found: spectrum.dim() }.into());
            }
            spectrum = spectrum.padded(dim)?;
        }
        if let Some(eps) = self.perturb {
            spectrum = perturb_spectrum(&spectrum, eps)?;
            // the matrix no longer matches the perturbed spectrum
            return Ok(State { matrix: None, spectrum });
        }
        Ok(State { matrix, spectrum })
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(io)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

/// Round to `digits` significant digits and print the shortest decimal that
/// reads back to the rounded value. Locale-independent.
fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() || x == 0.0 {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let rounded: f64 = format!("{:.*e}", digits.clamp(1, 17) - 1, x).parse().expect("formatted float");
    if (1e-5..1e16).contains(&rounded.abs()) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

struct Out {
    common_bits: bool,
    digits: usize,
}

impl Out {
    fn entropy(&self, x: f64) -> String {
        sig(if self.common_bits { x / std::f64::consts::LN_2 } else { x }, self.digits)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = String::new();
    match run(&cli, &mut stdout) {
        Ok(code) => {
            if let Err(e) = emit(&cli.common, &stdout) {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code());
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(h) = e.hint() {
                eprintln!("{h}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn emit(common: &Common, text: &str) -> Result<(), CliError> {
    match &common.output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn seed(common: &Common) -> u64 {
    match common.seed {
        Some(s) => s,
        None if common.nondeterministic => {
            let s = rand::random::<u64>();
            eprintln!("seed: {s:#x}");
            s
        }
        None => DEFAULT_SEED,
    }
}

fn run(cli: &Cli, out: &mut String) -> Result<u8, CliError> {
    let common = &cli.common;
    if common.workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let fmt = Out { common_bits: common.bits, digits: common.precision };
    let csv = common.format == Format::Csv;
    let stream = RngStream::new(seed(common), 0);
    match &cli.command {
        Command::Entropy { input, quadrature } => {
            let state = input.load()?;
            let report = absolute_entropy(&state.spectrum, state.spectrum.dim())?;
            let quad = if *quadrature {
                Some(entropy_by_quadrature(&state.spectrum, state.spectrum.dim())?)
            } else {
                None
            };
            write_entropy(out, &fmt, csv, &report, quad);
        }
        Command::Mc { input, samples, mode } => {
            let state = input.load()?;
            let est = match (mode, &state.matrix) {
                (Mode::Basis, Some(rho)) => mc_entropy_estimate(rho, *samples, stream, SamplingMode::Basis, common.workers)?,
                (Mode::Basis, None) => {
                    let rho = DensityMatrix::diagonal(state.spectrum.values())?;
                    mc_entropy_estimate(&rho, *samples, stream, SamplingMode::Basis, common.workers)?
                }
                (Mode::Sphere, _) => mc_entropy_from_spectrum(&state.spectrum, *samples, stream, common.workers)?,
            };
            let exact = absolute_entropy(&state.spectrum, state.spectrum.dim())?.s_total;
            let z = est.z_score(exact);
            if csv {
                let _ = writeln!(out, "mean,stderr,samples,seed,closed_form,z");
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    fmt.entropy(est.mean),
                    fmt.entropy(est.stderr),
                    est.samples,
                    est.seed,
                    fmt.entropy(exact),
                    sig(z, 6)
                );
            } else {
                let _ = writeln!(out, "mean        {}", fmt.entropy(est.mean));
                let _ = writeln!(out, "stderr      {}", fmt.entropy(est.stderr));
                let _ = writeln!(out, "samples     {}", est.samples);
                let _ = writeln!(out, "seed        {:#x}", est.seed);
                let _ = writeln!(out, "closed_form {}", fmt.entropy(exact));
                let _ = writeln!(out, "z           {}", sig(z, 6));
            }
        }
        Command::Pdensity { input, bins } => {
            let state = input.load()?;
            let curve = density_curve(&state.spectrum, state.spectrum.dim(), *bins)?;
            let _ = writeln!(out, "s,p");
            for (s, p) in curve.grid.iter().zip(&curve.densities) {
                let _ = writeln!(out, "{},{}", sig(*s, fmt.digits), sig(*p, fmt.digits));
            }
        }
        Command::Fig1 { dim, samples, max_n } => {
            let mut rows = fig1_uniform_curve(*max_n)?;
            rows.extend(fig1_random_mixtures(*dim, *samples, stream, common.workers)?);
            out.push_str(&fig1_csv(&rows));
        }
        Command::Inset { max_n } => out.push_str(&inset_csv(&fig1_inset(*max_n)?)),
        Command::Check { ids, trials, dims, grid } => {
            let ids = ids
                .iter()
                .map(|s| InequalityId::parse(s.trim()).ok_or_else(|| CliError::Usage(format!("unknown inequality id {s:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let config = SuiteConfig { trials: *trials, dims: dims.clone(), grid_max: *grid, ids };
            let reports = inequality_suite(&config, stream, common.workers)?;
            if csv {
                out.push_str(&reports_csv(&reports));
            } else {
                out.push_str(&reports_summary(&reports));
            }
            if reports.iter().any(|r| r.failed()) {
                return Ok(4);
            }
        }
        Command::RandomState { dim, kind } => {
            let mut rng = stream.domain("random-state").rng();
            match kind {
                Kind::Mixed => out.push_str(&write_density(&hilbert_schmidt_density(*dim, &mut rng)?)),
                Kind::Pure => out.push_str(&write_density(&DensityMatrix::from(&random_pure_state(*dim, &mut rng)?))),
                Kind::Spectrum => out.push_str(&write_spectrum(random_spectrum(*dim, &mut rng)?.values())),
            }
        }
        Command::Perturb { input } => {
            if input.perturb.is_none() {
                return Err(CliError::Usage("perturb needs --perturb EPSILON".into()));
            }
            out.push_str(&write_spectrum(input.load()?.spectrum.values()));
        }
    }
    Ok(0)
}

fn write_entropy(out: &mut String, fmt: &Out, csv: bool, r: &EntropyReport, quadrature: Option<f64>) {
    let mut fields = vec![
        ("dim", r.dim.to_string()),
        ("S_H", fmt.entropy(r.s_h)),
        ("S0", fmt.entropy(r.s0)),
        ("S_F", fmt.entropy(r.s_f)),
        ("S", fmt.entropy(r.s_total)),
    ];
    if let Some(q) = quadrature {
        fields.push(("S_quadrature", fmt.entropy(q)));
    }
    if csv {
        let header: Vec<&str> = fields.iter().map(|f| f.0).collect();
        let values: Vec<&str> = fields.iter().map(|f| f.1.as_str()).collect();
        let _ = writeln!(out, "{}", header.join(","));
        let _ = writeln!(out, "{}", values.join(","));
    } else {
        for (k, v) in fields {
            let _ = writeln!(out, "{k:<13}{v}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(std::f64::consts::LN_2, 12), "0.69314718056");
        assert_eq!(sig(0.5, 12), "0.5");
        assert_eq!(sig(0.0, 12), "0");
        assert_eq!(sig(123456.789, 3), "123000");
        assert_eq!(sig(3.376474477771e-18, 4), "3.376e-18");
    }

    #[test]
    fn seeds_and_dims() {
        assert_eq!(parse_seed("0x5EED").unwrap(), 0x5EED);
        assert_eq!(parse_seed("42").unwrap(), 42);
        assert!(parse_seed("x").is_err());
        assert_eq!(parse_dims("2x3").unwrap(), (2, 3));
        assert!(parse_dims("23").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
