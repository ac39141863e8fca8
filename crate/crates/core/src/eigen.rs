//! Cyclic Jacobi eigensolver for small complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the classical real Jacobi rotation. Eigenvectors are
//! accumulated as the product of all rotations, so they stay orthonormal to
//! working precision regardless of eigenvalue clustering.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;
/// Stop once the off-diagonal Frobenius norm is this small relative to the full norm.
const RELATIVE_OFF_TOLERANCE: f64 = 1e-15;

/// Eigen-decomposition of a Hermitian matrix. Only the lower triangle's
/// conjugate-symmetric partner is assumed consistent; the input is not checked.
///
/// Returns eigenvalues (unsorted, in solver order) and the unitary whose
/// columns are the matching eigenvectors.
pub fn jacobi_hermitian(a: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<Complex64>::identity(n, n);
    if n == 1 {
        return Ok((vec![a[(0, 0)].re], v));
    }

    let fro = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = RELATIVE_OFF_TOLERANCE * fro.max(f64::MIN_POSITIVE);

    let mut off = off_diagonal_norm(&a);
    let mut sweeps = 0;
    while off > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::ConvergenceFailure { sweeps, off_norm: off });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        let next = off_diagonal_norm(&a);
        // rounding floor reached
        if next >= off && next <= 1e3 * f64::EPSILON * fro {
            break;
        }
        off = next;
    }

    let values = (0..n).map(|i| a[(i, i)].re).collect();
    Ok((values, v))
}

fn off_diagonal_norm(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut DMatrix<Complex64>, v: &mut DMatrix<Complex64>, p: usize, q: usize) {
    let z = a[(p, q)];
    let mag = z.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = z / mag; // e^{i phi}

    let theta = 0.5 * (aqq - app) / mag;
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // V restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
    let vqp = -s * phase.conj();
    let vqq = c * phase.conj();
    let n = a.nrows();

    // A <- A V
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * vqp;
        a[(k, q)] = akp * s + akq * vqq;
    }
    // A <- V^H A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * vqp.conj();
        a[(q, k)] = apk * s + aqk * vqq.conj();
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(app - t * mag, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * mag, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * vqp;
        v[(k, q)] = vkp * s + vkq * vqq;
    }
}
