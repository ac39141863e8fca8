//! Quantum state representation and state-composition operations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::eigen::jacobi_hermitian;
use crate::error::{Error, Result};
use crate::spectrum::{Spectrum, DEFAULT_CLUSTER_TOLERANCE, NEGATIVE_CLAMP};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-10;
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Hermitian, positive semi-definite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

/// Orthonormal basis stored as the columns of a unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    matrix: CMatrix,
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

/// Which factor of a bipartite system to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Validates a raw matrix as a density matrix.
///
/// Asymmetry up to [`HERMITIAN_TOLERANCE`] is removed by `(M + M^H) / 2`.
pub fn validate_density(raw: CMatrix) -> Result<DensityMatrix> {
    let (rows, cols) = raw.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if rows == 0 {
        return Err(Error::EmptyDimension);
    }
    if raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let asym = max_asymmetry(&raw);
    if asym > HERMITIAN_TOLERANCE {
        return Err(Error::NonHermitian(asym));
    }
    let matrix = hermitian_part(&raw);
    let trace: f64 = (0..rows).map(|i| matrix[(i, i)].re).sum();
    if (trace - 1.0).abs() > TRACE_TOLERANCE {
        return Err(Error::TraceDeviation(trace));
    }
    let (values, _) = jacobi_hermitian(&matrix)?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -NEGATIVE_CLAMP {
        return Err(Error::NegativeEigenvalue(min));
    }
    Ok(DensityMatrix { matrix })
}

fn max_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        Ok(Self { matrix: CMatrix::identity(dim, dim).map(|z| z / dim as f64) })
    }

    /// Diagonal matrix with the given probabilities on the diagonal.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let v = CVector::from_iterator(probs.len(), probs.iter().map(|&p| Complex64::new(p, 0.0)));
        validate_density(CMatrix::from_diagonal(&v))
    }

    /// `U diag(p) U^H`.
    pub fn from_spectrum(spectrum: &Spectrum, basis: &MeasurementBasis) -> Result<Self> {
        if spectrum.dim() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: spectrum.dim() });
        }
        let u = basis.matrix();
        let d = CVector::from_iterator(spectrum.dim(), spectrum.values().iter().map(|&p| Complex64::new(p, 0.0)));
        let m = u * CMatrix::from_diagonal(&d) * u.adjoint();
        Ok(Self { matrix: hermitian_part(&m) })
    }

    /// Probabilities `<a|rho|a>` for each column `a` of the basis.
    pub fn outcome_probabilities(&self, basis: &MeasurementBasis) -> Result<Vec<f64>> {
        if basis.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: basis.dim() });
        }
        let u = basis.matrix();
        let rotated = u.adjoint() * &self.matrix * u;
        Ok((0..self.dim()).map(|i| rotated[(i, i)].re.max(0.0)).collect())
    }

    // Internal constructor for results that are density matrices by construction.
    fn from_trusted(matrix: CMatrix) -> Self {
        Self { matrix: hermitian_part(&matrix) }
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        let a = psi.amplitudes();
        DensityMatrix::from_trusted(a * a.adjoint())
    }
}

impl MeasurementBasis {
    pub fn from_unitary(matrix: CMatrix) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        let residual = orthonormality_residual(&matrix);
        if residual > ORTHONORMAL_TOLERANCE {
            return Err(Error::InvalidArgument(format!("basis columns not orthonormal (residual {residual:e})")));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn column(&self, j: usize) -> CVector {
        self.matrix.column(j).into_owned()
    }

    /// `max |(U^H U - I)_ij|`.
    pub fn orthonormality_residual(&self) -> f64 {
        orthonormality_residual(&self.matrix)
    }

    /// One rank-1 projector per basis vector.
    pub fn rank_one_projectors(&self) -> Vec<CMatrix> {
        (0..self.dim())
            .map(|j| {
                let c = self.column(j);
                &c * c.adjoint()
            })
            .collect()
    }
}

fn orthonormality_residual(u: &CMatrix) -> f64 {
    let n = u.ncols();
    let gram = u.adjoint() * u;
    (gram - CMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyDimension);
        }
        let norm2 = amplitudes.norm_squared();
        if (norm2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidArgument(format!("state norm^2 is {norm2}")));
        }
        Ok(Self { amplitudes })
    }

    /// Scales a non-zero vector to unit norm.
    pub fn normalized(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        Ok(Self { amplitudes: v.map(|z| z / norm) })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `|Psi_r|^2` for each component.
    pub fn weights(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Eigen-decomposition of a density matrix into a clustered spectrum and the
/// matching eigenbasis (columns ordered like the descending spectrum).
pub fn eig_hermitian(rho: &DensityMatrix, cluster_tolerance: f64) -> Result<(Spectrum, MeasurementBasis)> {
    let (values, vectors) = jacobi_hermitian(rho.matrix())?;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let basis = CMatrix::from_fn(vectors.nrows(), vectors.ncols(), |r, c| vectors[(r, order[c])]);
    let spectrum = Spectrum::with_tolerance(sorted, cluster_tolerance)?;
    Ok((spectrum, MeasurementBasis::from_trusted(basis)))
}

/// Spectrum with the default cluster tolerance.
pub fn spectrum_of(rho: &DensityMatrix) -> Result<Spectrum> {
    eig_hermitian(rho, DEFAULT_CLUSTER_TOLERANCE).map(|(s, _)| s)
}

/// Kronecker product `a (x) b`.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_trusted(a.matrix().kronecker(b.matrix()))
}

/// Reduced state of one factor of a `dims.0 x dims.1` bipartite system.
pub fn partial_trace(rho: &DensityMatrix, dims: (usize, usize), keep: Subsystem) -> Result<DensityMatrix> {
    let (n, m) = dims;
    if n == 0 || m == 0 {
        return Err(Error::EmptyDimension);
    }
    if n * m != rho.dim() {
        return Err(Error::DimensionMismatch { expected: n * m, found: rho.dim() });
    }
    let r = rho.matrix();
    let out = match keep {
        Subsystem::A => CMatrix::from_fn(n, n, |i, j| (0..m).map(|k| r[(i * m + k, j * m + k)]).sum()),
        Subsystem::B => CMatrix::from_fn(m, m, |i, j| (0..n).map(|k| r[(k * m + i, k * m + j)]).sum()),
    };
    Ok(DensityMatrix::from_trusted(out))
}

/// Post-measurement state `sum_i P_i rho P_i`.
pub fn projective_update(rho: &DensityMatrix, projectors: &[CMatrix]) -> Result<DensityMatrix> {
    let n = rho.dim();
    if projectors.is_empty() {
        return Err(Error::IncompleteProjectorSet(f64::INFINITY));
    }
    for p in projectors {
        if p.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, found: p.nrows() });
        }
    }
    let mut residual = 0.0f64;
    let total = projectors.iter().fold(CMatrix::zeros(n, n), |acc, p| acc + p);
    residual = residual.max(max_abs(&(total - CMatrix::identity(n, n))));
    for (i, p) in projectors.iter().enumerate() {
        for (j, q) in projectors.iter().enumerate().skip(i) {
            let prod = p * q;
            let expected = if i == j { p.clone() } else { CMatrix::zeros(n, n) };
            residual = residual.max(max_abs(&(prod - expected)));
        }
    }
    if residual > ORTHONORMAL_TOLERANCE {
        return Err(Error::IncompleteProjectorSet(residual));
    }
    let out = projectors
        .iter()
        .fold(CMatrix::zeros(n, n), |acc, p| acc + p * rho.matrix() * p);
    Ok(DensityMatrix::from_trusted(out))
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Computational-basis projectors `|i><i|`.
pub fn computational_projectors(dim: usize) -> Vec<CMatrix> {
    MeasurementBasis::identity(dim).rank_one_projectors()
}
