//! Absolute (basis-averaged) information entropy of quantum states.
//!
//! The absolute entropy of a density matrix is the Shannon entropy of a
//! measurement's outcomes averaged over all measurement bases with the Haar
//! measure. It splits as `S = S0(N) + F`: the minimum uncertainty entropy of a
//! pure state in dimension `N`, plus an excess term `F` that depends only on the
//! non-zero eigenvalues and is bounded by `1 - gamma`.
//!
//! The crate evaluates `S` three ways:
//!
//! - [`entropy::absolute_entropy`]: closed form, with `F` computed as a
//!   confluent divided difference of `x^N ln x` over the eigenvalues.
//! - [`density::entropy_by_quadrature`]: piecewise-analytic integration of
//!   `N f(s) P(s)` using the explicit density `P(s)`.
//! - [`oracle::mc_entropy_estimate`]: Monte Carlo over Haar-random bases or
//!   random pure states.
//!
//! [`experiments`] reproduces the `S_F` versus `S_H` tables and the
//! subsystem/measurement inequality scans built on top of these.

pub mod density;
pub mod divdiff;
pub mod eigen;
pub mod entropy;
pub mod error;
pub mod experiments;
pub mod io;
pub mod oracle;
pub mod precision;
pub mod rng;
pub mod sampling;
pub mod spectrum;
pub mod state;

pub use error::{Error, Result};
pub use rng::{RngStream, DEFAULT_SEED};
pub use spectrum::{perturb_spectrum, Spectrum};
pub use state::{
    eig_hermitian, partial_trace, projective_update, tensor, validate_density, DensityMatrix, MeasurementBasis,
    PureState, Subsystem,
};
