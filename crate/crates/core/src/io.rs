//! Density-matrix and spectrum file formats.
//!
//! Matrix file (JSON, version 1):
//!
//! ```text
//! {"format": "qent-density-matrix", "version": 1, "dim": 2,
//!  "matrix": [[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]]}
//! ```
//!
//! `matrix` lists the `dim * dim` entries row-major as `[re, im]` pairs.
//! `format` and `version` may be omitted on input.
//!
//! Spectrum file: whitespace-separated reals (`#` starts a comment).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::{validate_density, CMatrix, DensityMatrix};

pub const MATRIX_FORMAT: &str = "qent-density-matrix";
pub const MATRIX_VERSION: u32 = 1;

/// Input that could not be parsed, as distinct from input that parsed but
/// failed validation (reported as [`crate::Error`]).
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed matrix file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported matrix file: {0}")]
    Format(String),
    #[error("matrix has {found} entries, expected {expected} for dim {dim}")]
    EntryCount { dim: usize, expected: usize, found: usize },
    #[error("bad spectrum token {token:?} at position {position}")]
    SpectrumToken { token: String, position: usize },
    #[error("spectrum file is empty")]
    EmptySpectrum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(default = "default_format")]
    pub format: String,
    #[serde(default = "default_version")]
    pub version: u32,
    pub dim: usize,
    pub matrix: Vec<[f64; 2]>,
}

fn default_format() -> String {
    MATRIX_FORMAT.to_string()
}

fn default_version() -> u32 {
    MATRIX_VERSION
}

impl MatrixFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let n = rho.dim();
        let matrix = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
            .collect();
        Self { format: default_format(), version: MATRIX_VERSION, dim: n, matrix }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, ParseError> {
        if self.format != MATRIX_FORMAT {
            return Err(ParseError::Format(format!("format {:?}", self.format)));
        }
        if self.version != MATRIX_VERSION {
            return Err(ParseError::Format(format!("version {}", self.version)));
        }
        let expected = self.dim * self.dim;
        if self.dim == 0 || self.matrix.len() != expected {
            return Err(ParseError::EntryCount { dim: self.dim, expected, found: self.matrix.len() });
        }
        let entries: Vec<Complex64> = self.matrix.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        Ok(CMatrix::from_row_slice(self.dim, self.dim, &entries))
    }
}

pub fn parse_matrix(text: &str) -> Result<CMatrix, ParseError> {
    let file: MatrixFile = serde_json::from_str(text)?;
    file.to_matrix()
}

/// Parses and validates a matrix file. The outer error is a parse failure; the
/// inner one a validation failure.
pub fn read_density(text: &str) -> Result<crate::Result<DensityMatrix>, ParseError> {
    Ok(validate_density(parse_matrix(text)?))
}

/// One matrix entry per line; floats use the shortest exact representation.
pub fn write_density(rho: &DensityMatrix) -> String {
    let file = MatrixFile::from_density(rho);
    let num = |x: f64| serde_json::to_string(&x).expect("finite entry");
    let entries: Vec<String> = file.matrix.iter().map(|[re, im]| format!("    [{}, {}]", num(*re), num(*im))).collect();
    format!(
        "{{\n  \"format\": \"{}\",\n  \"version\": {},\n  \"dim\": {},\n  \"matrix\": [\n{}\n  ]\n}}\n",
        file.format,
        file.version,
        file.dim,
        entries.join(",\n")
    )
}

pub fn parse_spectrum(text: &str) -> Result<Vec<f64>, ParseError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let content = line.split('#').next().unwrap_or("");
        for token in content.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let v: f64 = token.parse().map_err(|_| ParseError::SpectrumToken {
                token: token.to_string(),
                position: out.len(),
            })?;
            out.push(v);
        }
    }
    if out.is_empty() {
        return Err(ParseError::EmptySpectrum);
    }
    Ok(out)
}

pub fn write_spectrum(values: &[f64]) -> String {
    let mut s = values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    s.push('\n');
    s
}

/// True when the text looks like a matrix file rather than a spectrum.
pub fn looks_like_matrix(text: &str) -> bool {
    text.trim_start().starts_with('{')
}
