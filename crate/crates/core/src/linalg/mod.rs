//! Dense complex linear algebra on tensor-product spaces.

mod eig;
mod matrix;
mod state;

pub use eig::{hermitian_eig, HermitianEigen, HERMITIAN_TOL};
pub use matrix::{kron, kron_vec, ComplexMatrix, C64};
pub use state::{
    partial_trace, partial_trace_matrix, trace_distance, DensityMatrix, HilbertDims,
    DEFAULT_PSD_TOL, DEFAULT_TRACE_TOL,
};

pub(crate) use matrix::ZERO;

use crate::error::{Error, Result};

/// Relative eigenvalue floor used when taking logarithms: `1e-12·max(1, λ_max)`.
pub fn clamp_threshold(lambda_max: f64) -> f64 {
    1e-12 * lambda_max.max(1.0)
}

/// How [`log_hermitian`] treats eigenvalues below [`clamp_threshold`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogPolicy {
    /// Replace small eigenvalues by the threshold.
    Clamp,
    /// Fail with [`Error::LogOfSingular`].
    Strict,
}

/// `V f(Λ) V†` for Hermitian `m`.
pub fn matrix_fn(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(m)?.map(f))
}

pub fn log_hermitian(m: &ComplexMatrix, policy: LogPolicy) -> Result<ComplexMatrix> {
    let e = hermitian_eig(m)?;
    let eps = clamp_threshold(e.max_value());
    if policy == LogPolicy::Strict && e.min_value() < eps {
        return Err(Error::LogOfSingular(e.min_value()));
    }
    Ok(e.map(|x| x.max(eps).ln()))
}

pub fn exp_hermitian(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    matrix_fn(m, f64::exp)
}

/// `ln Tr e^H`, shifted by the top eigenvalue to avoid overflow.
pub fn log_trace_exp(h: &ComplexMatrix) -> Result<f64> {
    let e = hermitian_eig(h)?;
    let top = e.max_value();
    let s: f64 = e.values.iter().map(|&x| (x - top).exp()).sum();
    Ok(top + s.ln())
}

/// Principal square root of a PSD matrix; eigenvalues in `[-tol, 0)` are
/// rounded to zero.
pub fn sqrt_psd(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let e = hermitian_eig(m)?;
    if e.min_value() < -tol {
        return Err(Error::NotPsd(e.min_value()));
    }
    Ok(e.map(|x| x.max(0.0).sqrt()))
}

/// `M^{-1/2}` for positive definite `M`.
pub fn inv_sqrt_pd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = hermitian_eig(m)?;
    let floor = 1e-14 * e.max_value().max(f64::MIN_POSITIVE);
    if e.min_value() <= floor {
        return Err(Error::NotPsd(e.min_value()));
    }
    Ok(e.map(|x| 1.0 / x.sqrt()))
}
