//! Random states, bases and spectra.
//!
//! Every function takes a generator by `&mut`; callers obtain one from an
//! [`RngStream`](crate::rng::RngStream) so sequences are reproducible.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::spectrum::Spectrum;
use crate::state::{CMatrix, CVector, DensityMatrix, MeasurementBasis, PureState};

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries (row-major fill).
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let entries: Vec<Complex64> = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    DMatrix::from_row_slice(rows, cols, &entries)
}

/// Haar-distributed unitary: QR of a Ginibre matrix, with each column of `Q`
/// multiplied by the phase of the matching diagonal entry of `R`. Without that
/// correction the result is not Haar distributed.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<MeasurementBasis> {
    if dim == 0 {
        return Err(Error::EmptyDimension);
    }
    let g = ginibre(dim, dim, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let mag = d.norm();
        let phase = if mag > 0.0 { d / mag } else { Complex64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    Ok(MeasurementBasis::from_trusted(q))
}

/// Uniform point on the unit sphere of `C^dim` (normalized complex Gaussian vector).
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<PureState> {
    if dim == 0 {
        return Err(Error::EmptyDimension);
    }
    loop {
        let v = CVector::from_iterator(dim, (0..dim).map(|_| complex_gaussian(rng)));
        if v.norm() > 0.0 {
            return PureState::normalized(v);
        }
    }
}

/// Sphere weights `|Psi_r|^2` of a random pure state, without building the state.
pub fn random_sphere_weights<R: Rng + ?Sized>(dim: usize, rng: &mut R, out: &mut Vec<f64>) {
    out.clear();
    let mut total = 0.0;
    for _ in 0..dim {
        let z = complex_gaussian(rng);
        let w = z.norm_sqr();
        total += w;
        out.push(w);
    }
    out.iter_mut().for_each(|w| *w /= total);
}

/// Flat Dirichlet sample on the probability simplex, via normalized exponentials.
pub fn flat_dirichlet<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

/// Random spectrum from the flat Dirichlet distribution.
pub fn random_spectrum<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Spectrum> {
    if dim == 0 {
        return Err(Error::EmptyDimension);
    }
    Spectrum::new(flat_dirichlet(dim, rng))
}

/// Hilbert-Schmidt random density matrix `G G^H / tr(G G^H)` with square Ginibre `G`.
pub fn hilbert_schmidt_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    if dim == 0 {
        return Err(Error::EmptyDimension);
    }
    let g = ginibre(dim, dim, rng);
    let w = &g * g.adjoint();
    let trace: f64 = (0..dim).map(|i| w[(i, i)].re).sum();
    let m = (&w + w.adjoint()).map(|z| z * (0.5 / trace));
    crate::state::validate_density(m)
}
