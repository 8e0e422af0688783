//! Entropy functionals in nats.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    clamp_threshold, hermitian_eig, kron, partial_trace_matrix, ComplexMatrix, DensityMatrix,
    HermitianEigen,
};
use crate::measurement::{left_multiply_local, Povm};

/// Probabilities below this contribute nothing to Shannon-type sums.
pub const PROB_FLOOR: f64 = 1e-15;

/// Leaked mass outside the support of σ above which `H(ρ, σ) = +∞`.
pub const SUPPORT_LEAK_TOL: f64 = 1e-9;

const PROB_NEG_TOL: f64 = 1e-12;
const PROB_SUM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyValue {
    pub nats: f64,
    pub finite: bool,
}

impl EntropyValue {
    pub fn finite(nats: f64) -> Self {
        Self { nats, finite: true }
    }

    pub fn infinite() -> Self {
        Self {
            nats: f64::INFINITY,
            finite: false,
        }
    }

    pub fn value(self) -> f64 {
        self.nats
    }
}

/// `−x ln x` summed over entries above [`PROB_FLOOR`].
pub(crate) fn eta_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter()
        .filter(|&x| x > PROB_FLOOR)
        .map(|x| -x * x.ln())
        .sum::<f64>()
        + 0.0 // pure states: −0.0 → 0.0
}

/// `−Σ λ ln λ` with eigenvalues below the clamp threshold contributing 0.
pub(crate) fn spectral_entropy(values: &[f64]) -> f64 {
    let top = values.iter().copied().fold(0.0, f64::max);
    let eps = clamp_threshold(top);
    values
        .iter()
        .filter(|&&x| x >= eps)
        .map(|&x| -x * x.ln())
        .sum::<f64>()
        + 0.0
}

fn eigen_of(m: &ComplexMatrix) -> HermitianEigen {
    // Callers pass matrices symmetrized on construction.
    hermitian_eig(&m.hermitian_part()).expect("Hermitian by construction")
}

pub fn von_neumann(rho: &DensityMatrix) -> EntropyValue {
    EntropyValue::finite(spectral_entropy(&eigen_of(rho.matrix()).values))
}

/// Entropy of a Hermitian PSD operator given as a raw matrix.
pub(crate) fn matrix_entropy(m: &ComplexMatrix) -> f64 {
    spectral_entropy(&eigen_of(m).values)
}

pub fn shannon(p: &[f64]) -> Result<EntropyValue> {
    if let Some(&bad) = p.iter().find(|&&x| x < -PROB_NEG_TOL || !x.is_finite()) {
        return Err(Error::InvalidProbabilities(format!("entry {bad}")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::InvalidProbabilities(format!("sum {s}")));
    }
    Ok(EntropyValue::finite(eta_sum(p.iter().copied())))
}

/// `H(ρ, σ) = Tr ρ(ln ρ − ln σ)`, evaluated in σ's eigenbasis.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<EntropyValue> {
    if rho.dims() != sigma.dims() {
        return Err(Error::DimensionMismatch(format!(
            "relative entropy between {} and {}",
            rho.dims(),
            sigma.dims()
        )));
    }
    let es = eigen_of(sigma.matrix());
    let eps = clamp_threshold(es.max_value());
    let mut cross = 0.0;
    let mut leaked = 0.0;
    for (k, &s) in es.values.iter().enumerate() {
        let v = es.vectors.column(k);
        let w = rho.matrix().expectation(&v).re;
        if s < eps {
            leaked += w.max(0.0);
        } else {
            cross += w * s.ln();
        }
    }
    if leaked > SUPPORT_LEAK_TOL {
        return Ok(EntropyValue::infinite());
    }
    let neg_s = -von_neumann(rho).nats;
    Ok(EntropyValue::finite(neg_s - cross))
}

fn require_factors(rho: &DensityMatrix, n: usize) -> Result<()> {
    if rho.dims().factors() != n {
        return Err(Error::InvalidDims(format!(
            "expected {n} tensor factors, got dims {}",
            rho.dims()
        )));
    }
    Ok(())
}

/// `S₁ + S₂ − S₁₂`.
pub fn mutual_information(rho12: &DensityMatrix) -> Result<EntropyValue> {
    require_factors(rho12, 2)?;
    let s1 = von_neumann(&rho12.partial_trace(&[0])?).nats;
    let s2 = von_neumann(&rho12.partial_trace(&[1])?).nats;
    let s12 = von_neumann(rho12).nats;
    Ok(EntropyValue::finite(s1 + s2 - s12))
}

fn check_povm_dim(p: &Povm, expect: usize, which: &str) -> Result<()> {
    if p.dim() != expect {
        return Err(Error::DimensionMismatch(format!(
            "{which} POVM has dimension {} but the factor has dimension {expect}",
            p.dim()
        )));
    }
    Ok(())
}

/// Joint outcome table `r(α,β) = Tr (P^α ⊗ Q^β) ρ₁₂`.
pub fn outcome_table(rho12: &DensityMatrix, p: &Povm, q: &Povm) -> Result<Vec<Vec<f64>>> {
    require_factors(rho12, 2)?;
    check_povm_dim(p, rho12.dims().dim(0), "first")?;
    check_povm_dim(q, rho12.dims().dim(1), "second")?;
    Ok(p.elements()
        .iter()
        .map(|pa| {
            q.elements()
                .iter()
                .map(|qb| kron(pa, qb).trace_product(rho12.matrix()).re)
                .collect()
        })
        .collect())
}

/// Shannon entropy of the joint outcome distribution of `P ⊗ Q`.
pub fn classical_entropy(rho12: &DensityMatrix, p: &Povm, q: &Povm) -> Result<EntropyValue> {
    let table = outcome_table(rho12, p, q)?;
    shannon(&table.concat())
}

/// Shannon entropy of the outcome distribution of `P` on a one-factor state.
pub fn classical_entropy_single(rho: &DensityMatrix, p: &Povm) -> Result<EntropyValue> {
    check_povm_dim(p, rho.dim(), "single-factor")?;
    shannon(&p.probabilities(rho.matrix()))
}

/// Unnormalized conditional operators `Tr₁ (P^α ⊗ I) ρ` on the remaining factors.
pub(crate) fn povm_blocks(rho: &DensityMatrix, p: &Povm) -> Result<Vec<ComplexMatrix>> {
    if rho.dims().factors() < 2 {
        return Err(Error::InvalidDims(format!(
            "need at least 2 factors, got {}",
            rho.dims()
        )));
    }
    check_povm_dim(p, rho.dims().dim(0), "first-factor")?;
    let rest: Vec<usize> = (1..rho.dims().factors()).collect();
    p.elements()
        .iter()
        .map(|pa| {
            let x = left_multiply_local(pa, rho.matrix(), rho.dims(), &[0]);
            Ok(partial_trace_matrix(&x, rho.dims(), &rest)?.hermitian_part())
        })
        .collect()
}

/// `−Σ_α Tr_rest[X_α ln X_α]` with `X_α = Tr₁ P^α ρ`: classical on factor 1,
/// quantum on every other factor. On a bipartite state this is `S^{cl,Q}`,
/// on a tripartite one `S^{cl,Q,Q}`.
pub fn classical_quantum_entropy(rho: &DensityMatrix, p: &Povm) -> Result<EntropyValue> {
    let total: f64 = povm_blocks(rho, p)?.iter().map(matrix_entropy).sum();
    Ok(EntropyValue::finite(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{HilbertDims, C64};

    fn dims(v: &[usize]) -> HilbertDims {
        HilbertDims::new(v.to_vec()).unwrap()
    }

    #[test]
    fn maximally_mixed_entropy() {
        for d in 1..6 {
            let s = von_neumann(&DensityMatrix::maximally_mixed(dims(&[d]))).nats;
            assert!((s - (d as f64).ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn pure_state_entropy_zero() {
        let psi = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let s = von_neumann(&DensityMatrix::pure(&psi, dims(&[2])).unwrap()).nats;
        assert!(s.abs() < 1e-14);
    }

    #[test]
    fn three_outcome_value() {
        // −(½ ln ½ + ⅓ ln ⅓ + ⅙ ln ⅙) evaluated independently.
        let expected = 0.5 * 2f64.ln() + 3f64.ln() / 3.0 + 6f64.ln() / 6.0;
        let p = [0.5, 1.0 / 3.0, 1.0 / 6.0];
        let s = von_neumann(&DensityMatrix::diagonal(&p, dims(&[3])).unwrap()).nats;
        assert!((s - expected).abs() < 1e-14);
        assert!((s - 1.011404).abs() < 1e-6);
        assert!((shannon(&p).unwrap().nats - s).abs() < 1e-14);
    }

    #[test]
    fn shannon_edge_cases() {
        assert_eq!(shannon(&[1.0, 0.0, 0.0]).unwrap().nats, 0.0);
        assert!((shannon(&[0.25; 4]).unwrap().nats - 4f64.ln()).abs() < 1e-15);
        assert!(shannon(&[1.1, -0.1]).is_err());
        assert!(shannon(&[0.5, 0.4]).is_err());
    }

    #[test]
    fn relative_entropy_cases() {
        let d = dims(&[3]);
        let zero = DensityMatrix::diagonal(&[1.0, 0.0, 0.0], d.clone()).unwrap();
        let one = DensityMatrix::diagonal(&[0.0, 1.0, 0.0], d.clone()).unwrap();
        let mixed = DensityMatrix::maximally_mixed(d.clone());
        assert!((relative_entropy(&zero, &mixed).unwrap().nats - 3f64.ln()).abs() < 1e-14);
        assert!(relative_entropy(&mixed, &mixed).unwrap().nats.abs() < 1e-14);
        let inf = relative_entropy(&zero, &one).unwrap();
        assert!(!inf.finite && inf.nats.is_infinite());
        assert!(relative_entropy(&zero, &DensityMatrix::maximally_mixed(dims(&[2]))).is_err());
    }

    #[test]
    fn bell_mutual_information() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let bell = DensityMatrix::pure(&[C64::new(s, 0.0), z, z, C64::new(s, 0.0)], dims(&[2, 2]))
            .unwrap();
        let i = mutual_information(&bell).unwrap().nats;
        assert!((i - 2.0 * 2f64.ln()).abs() < 1e-13);
        assert!(mutual_information(&DensityMatrix::maximally_mixed(dims(&[2, 2, 2]))).is_err());
    }

    #[test]
    fn trivial_povm_classical_entropy_vanishes() {
        let rho = DensityMatrix::maximally_mixed(dims(&[2, 3]));
        let s = classical_entropy(&rho, &Povm::trivial(2), &Povm::trivial(3)).unwrap();
        assert!(s.nats.abs() < 1e-15);
        assert!(classical_entropy(&rho, &Povm::trivial(3), &Povm::trivial(2)).is_err());
    }

    #[test]
    fn classical_matches_quantum_on_diagonal_state() {
        let p = [0.1, 0.2, 0.3, 0.15, 0.05, 0.2];
        let rho = DensityMatrix::diagonal(&p, dims(&[2, 3])).unwrap();
        let scl = classical_entropy(&rho, &Povm::basis(2), &Povm::basis(3))
            .unwrap()
            .nats;
        assert!((scl - von_neumann(&rho).nats).abs() < 1e-14);
        let sclq = classical_quantum_entropy(&rho, &Povm::basis(2))
            .unwrap()
            .nats;
        assert!((sclq - scl).abs() < 1e-14);
    }

    #[test]
    fn trivial_povm_classical_quantum_is_reduced_entropy() {
        let s2 = [0.7, 0.3];
        let rho = DensityMatrix::diagonal(&[0.2, 0.1, 0.5, 0.2], dims(&[2, 2])).unwrap();
        let v = classical_quantum_entropy(&rho, &Povm::trivial(2))
            .unwrap()
            .nats;
        let expected = eta_sum(s2);
        assert!((v - expected).abs() < 1e-14);
    }
}
