use serde::{Deserialize, Serialize};

use super::eig::{hermitian_eig, HermitianEigen};
use super::matrix::{kron, ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

pub const DEFAULT_TRACE_TOL: f64 = 1e-9;
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// Ordered tensor factor dimensions `(d₁, d₂, …)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct HilbertDims(Vec<usize>);

impl HilbertDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDims("no tensor factors".into()));
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidDims(format!("factor {pos} has dimension 0")));
        }
        Ok(Self(dims))
    }

    pub fn single(d: usize) -> Result<Self> {
        Self::new(vec![d])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn factors(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn dim(&self, factor: usize) -> usize {
        self.0[factor]
    }

    /// Product of the dimensions of `factors`.
    pub fn subsystem_total(&self, factors: &[usize]) -> usize {
        factors.iter().map(|&f| self.0[f]).product()
    }

    pub fn select(&self, factors: &[usize]) -> HilbertDims {
        HilbertDims(factors.iter().map(|&f| self.0[f]).collect())
    }

    pub fn concat(&self, other: &HilbertDims) -> HilbertDims {
        HilbertDims(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl TryFrom<Vec<usize>> for HilbertDims {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        HilbertDims::new(v)
    }
}

impl From<HilbertDims> for Vec<usize> {
    fn from(d: HilbertDims) -> Self {
        d.0
    }
}

impl std::fmt::Display for HilbertDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Positive semi-definite, Hermitian matrix tagged with its tensor factor
/// dimensions. Unit trace unless built through [`DensityMatrix::unnormalized`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dims: HilbertDims,
    trace_tol: f64,
    psd_tol: f64,
    unnormalized: bool,
}

impl DensityMatrix {
    /// Validates a normalized state with the default tolerances.
    pub fn new(mat: ComplexMatrix, dims: HilbertDims) -> Result<Self> {
        Self::with_tolerances(mat, dims, DEFAULT_TRACE_TOL, DEFAULT_PSD_TOL, false)
    }

    /// Positive trace-class operator with any positive trace.
    pub fn unnormalized(mat: ComplexMatrix, dims: HilbertDims) -> Result<Self> {
        Self::with_tolerances(mat, dims, DEFAULT_TRACE_TOL, DEFAULT_PSD_TOL, true)
    }

    pub fn with_tolerances(
        mat: ComplexMatrix,
        dims: HilbertDims,
        trace_tol: f64,
        psd_tol: f64,
        unnormalized: bool,
    ) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare(mat.rows(), mat.cols()));
        }
        if mat.rows() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {0}x{0} but dims {dims} have total {1}",
                mat.rows(),
                dims.total()
            )));
        }
        let asym = mat.asymmetry();
        if asym > trace_tol {
            return Err(Error::NotHermitian(asym));
        }
        let tr = mat.trace().re;
        if unnormalized {
            if tr <= 0.0 {
                return Err(Error::InvalidTrace(tr));
            }
        } else if (tr - 1.0).abs() > trace_tol {
            return Err(Error::InvalidTrace(tr));
        }
        let mat = mat.hermitian_part();
        let min = hermitian_eig(&mat)?.min_value();
        if min < -psd_tol {
            return Err(Error::NotPsd(min));
        }
        Ok(Self {
            mat,
            dims,
            trace_tol,
            psd_tol,
            unnormalized,
        })
    }

    /// Wraps a matrix produced internally from valid states; symmetrizes but
    /// skips the spectral check.
    pub(crate) fn from_trusted(mat: ComplexMatrix, dims: HilbertDims, unnormalized: bool) -> Self {
        debug_assert_eq!(mat.rows(), dims.total());
        Self {
            mat: mat.hermitian_part(),
            dims,
            trace_tol: DEFAULT_TRACE_TOL,
            psd_tol: DEFAULT_PSD_TOL,
            unnormalized,
        }
    }

    /// `|ψ⟩⟨ψ|` for a vector normalized here.
    pub fn pure(psi: &[C64], dims: HilbertDims) -> Result<Self> {
        if psi.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for dims {dims}",
                psi.len()
            )));
        }
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self::from_trusted(ComplexMatrix::outer(&v), dims, false))
    }

    pub fn maximally_mixed(dims: HilbertDims) -> Self {
        let n = dims.total();
        Self::from_trusted(
            ComplexMatrix::identity(n).scale(1.0 / n as f64),
            dims,
            false,
        )
    }

    /// Diagonal state with the given probabilities in the product basis.
    pub fn diagonal(probs: &[f64], dims: HilbertDims) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diag(probs), dims)
    }

    /// `self ⊗ other` with concatenated factor lists.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_trusted(
            kron(&self.mat, &other.mat),
            self.dims.concat(&other.dims),
            self.unnormalized || other.unnormalized,
        )
    }

    /// `c·ρ` for `c > 0`; the result is flagged unnormalized.
    pub fn scaled(&self, c: f64) -> Result<DensityMatrix> {
        if c <= 0.0 || !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "scale factor {c} must be positive"
            )));
        }
        Ok(DensityMatrix::from_trusted(
            self.mat.scale(c),
            self.dims.clone(),
            true,
        ))
    }

    /// `λ·self + (1-λ)·other`.
    pub fn mix(&self, other: &DensityMatrix, lambda: f64) -> Result<DensityMatrix> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "cannot mix states on {} and {}",
                self.dims, other.dims
            )));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!(
                "mixing weight {lambda} outside [0,1]"
            )));
        }
        let m = &self.mat.scale(lambda) + &other.mat.scale(1.0 - lambda);
        Ok(DensityMatrix::from_trusted(
            m,
            self.dims.clone(),
            self.unnormalized || other.unnormalized,
        ))
    }

    /// Conjugation `U ρ U†` by a unitary on the full space.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        if u.rows() != self.dim() || !u.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator on a {}-dimensional state",
                u.rows(),
                u.cols(),
                self.dim()
            )));
        }
        let m = &(u * &self.mat) * &u.adjoint();
        Ok(DensityMatrix::from_trusted(
            m,
            self.dims.clone(),
            self.unnormalized,
        ))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dims(&self) -> &HilbertDims {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn is_unnormalized(&self) -> bool {
        self.unnormalized
    }

    pub fn tolerances(&self) -> (f64, f64) {
        (self.trace_tol, self.psd_tol)
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        hermitian_eig(&self.mat)
    }

    /// Real diagonal in the product basis.
    pub fn diagonal_probs(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }

    /// Reduced state on `keep` (0-based factor indices, any order; the
    /// kept factors retain their original relative order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = normalize_factor_set(keep, self.dims.factors())?;
        let reduced = partial_trace_sorted(&self.mat, &self.dims, &keep);
        Ok(DensityMatrix::from_trusted(
            reduced,
            self.dims.select(&keep),
            self.unnormalized,
        ))
    }
}

pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    rho.partial_trace(keep)
}

/// Partial trace of an arbitrary (not necessarily Hermitian) operator.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: &HilbertDims,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows(), m.cols()));
    }
    if m.rows() != dims.total() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {0}x{0} but dims {dims} have total {1}",
            m.rows(),
            dims.total()
        )));
    }
    let keep = normalize_factor_set(keep, dims.factors())?;
    Ok(partial_trace_sorted(m, dims, &keep))
}

fn normalize_factor_set(keep: &[usize], factors: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::InvalidFactors("empty keep set".into()));
    }
    let mut k = keep.to_vec();
    k.sort_unstable();
    if let Some(&bad) = k.iter().find(|&&f| f >= factors) {
        return Err(Error::InvalidFactors(format!(
            "factor index {bad} out of range for {factors} factors"
        )));
    }
    if k.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidFactors(format!(
            "duplicate factor in {keep:?}"
        )));
    }
    Ok(k)
}

/// Flat-index offsets of all multi-indices over `factors`, with the last
/// listed factor varying fastest.
fn factor_offsets(dims: &HilbertDims, factors: &[usize]) -> Vec<usize> {
    let d = dims.as_slice();
    let mut strides = vec![1usize; d.len()];
    for f in (0..d.len().saturating_sub(1)).rev() {
        strides[f] = strides[f + 1] * d[f + 1];
    }
    let mut offsets = vec![0usize];
    for &f in factors {
        let mut next = Vec::with_capacity(offsets.len() * d[f]);
        for &o in &offsets {
            for digit in 0..d[f] {
                next.push(o + digit * strides[f]);
            }
        }
        offsets = next;
    }
    offsets
}

fn partial_trace_sorted(m: &ComplexMatrix, dims: &HilbertDims, keep: &[usize]) -> ComplexMatrix {
    let traced: Vec<usize> = (0..dims.factors()).filter(|f| !keep.contains(f)).collect();
    let kept_off = factor_offsets(dims, keep);
    let traced_off = factor_offsets(dims, &traced);
    let k = kept_off.len();
    let mut out = ComplexMatrix::zeros(k, k);
    for (a, &ra) in kept_off.iter().enumerate() {
        for (b, &rb) in kept_off.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &traced_off {
                acc += m[(ra + t, rb + t)];
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// `½ Σ |eig(a − b)|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between {} and {}",
            a.dims(),
            b.dims()
        )));
    }
    let diff = a.matrix() - b.matrix();
    let e = hermitian_eig(&diff)?;
    Ok(0.5 * e.values.iter().map(|x| x.abs()).sum::<f64>())
}

#[derive(Serialize, Deserialize)]
struct DensityJson {
    dims: HilbertDims,
    matrix: ComplexMatrix,
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DensityJson {
            dims: self.dims.clone(),
            matrix: self.mat.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DensityJson::deserialize(d)?;
        DensityMatrix::new(j.matrix, j.dims).map_err(serde::de::Error::custom)
    }
}
