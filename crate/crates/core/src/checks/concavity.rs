use super::{worst_lambda, InequalityReport};
use crate::entropy::von_neumann;
use crate::error::{Error, Result};
use crate::linalg::{
    exp_hermitian, hermitian_eig, log_hermitian, log_trace_exp, ComplexMatrix, DensityMatrix,
    LogPolicy, HERMITIAN_TOL,
};
use crate::measurement::KrausSet;
use crate::random::{random_hermitian, random_kraus, random_positive_definite, Seed};

/// Argument bounds for generated `A^α`.
pub const A_MIN_EIGENVALUE: f64 = 0.1;
pub const A_MAX_EIGENVALUE: f64 = 10.0;

/// Fixed `L`, sub-complete Kraus set and positive definite `A^α` for the map
/// `(A¹,…,A^M) ↦ Tr exp(L + Σ_α K^{α*} (ln A^α) K^α)`.
#[derive(Clone, Debug)]
pub struct ConcavityInstance {
    pub l_op: ComplexMatrix,
    pub kraus: KrausSet,
    pub a_ops: Vec<ComplexMatrix>,
}

impl ConcavityInstance {
    pub fn new(l_op: ComplexMatrix, kraus: KrausSet, a_ops: Vec<ComplexMatrix>) -> Result<Self> {
        let d = kraus.dim();
        if a_ops.len() != kraus.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} arguments for {} Kraus operators",
                a_ops.len(),
                kraus.len()
            )));
        }
        if !l_op.is_square() || l_op.rows() != d {
            return Err(Error::DimensionMismatch(format!(
                "L is {}x{} but Kraus operators are {d}x{d}",
                l_op.rows(),
                l_op.cols()
            )));
        }
        let asym = l_op.asymmetry();
        if asym > HERMITIAN_TOL * l_op.max_abs().max(1.0) {
            return Err(Error::NotHermitian(asym));
        }
        for a in &a_ops {
            if !a.is_square() || a.rows() != d {
                return Err(Error::DimensionMismatch(format!(
                    "argument of shape {}x{} for dimension {d}",
                    a.rows(),
                    a.cols()
                )));
            }
            let min = hermitian_eig(a)?.min_value();
            if min <= 0.0 {
                return Err(Error::NotPsd(min));
            }
        }
        Ok(Self { l_op, kraus, a_ops })
    }

    pub fn dim(&self) -> usize {
        self.kraus.dim()
    }

    /// Same `L` and Kraus set with new arguments.
    pub fn with_args(&self, a_ops: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(self.l_op.clone(), self.kraus.clone(), a_ops)
    }

    /// Two instances sharing `L` and the Kraus set. `L` is a GUE matrix;
    /// the Kraus set is the first `m` blocks of a random set of `m + 1`, so
    /// `Σ K†K ≤ I`; the `A^α` have spectra in `[0.1, 10]`.
    pub fn random_pair(dim: usize, m: usize, seed: Seed) -> Result<(Self, Self)> {
        let l_op = random_hermitian(dim, 1.0, &mut seed.rng(0));
        let full = random_kraus(dim, m + 1, seed.derive(1))?;
        let kraus = KrausSet::sub_complete(full.ops()[..m].to_vec(), vec![0])?;
        let args = |offset: u64| -> Result<Vec<ComplexMatrix>> {
            (0..m as u64)
                .map(|a| {
                    random_positive_definite(
                        dim,
                        A_MIN_EIGENVALUE,
                        A_MAX_EIGENVALUE,
                        seed.derive(offset + a),
                    )
                })
                .collect()
        };
        let a = Self::new(l_op.clone(), kraus.clone(), args(100)?)?;
        let b = Self::new(l_op, kraus, args(200)?)?;
        Ok((a, b))
    }
}

/// `Tr exp(L + Σ_α K^{α*} (ln A^α) K^α)`.
pub fn trace_exp_map(inst: &ConcavityInstance) -> Result<f64> {
    let mut exponent = inst.l_op.hermitian_part();
    for (k, a) in inst.kraus.ops().iter().zip(&inst.a_ops) {
        let log_a = log_hermitian(a, LogPolicy::Strict)?;
        exponent = &exponent + &(&(&k.adjoint() * &log_a) * k);
    }
    Ok(exp_hermitian(&exponent.hermitian_part())?.trace().re)
}

/// Joint concavity: `λF(A) + (1−λ)F(B) ≤ F(λA + (1−λ)B)`, reported at the
/// weight with the smallest slack.
pub fn check_concave_map(
    inst_a: &ConcavityInstance,
    inst_b: &ConcavityInstance,
    lambdas: &[f64],
) -> Result<InequalityReport> {
    if inst_a.l_op != inst_b.l_op || inst_a.kraus != inst_b.kraus {
        return Err(Error::InvalidArgument(
            "concavity instances must share L and the Kraus set".into(),
        ));
    }
    let fa = trace_exp_map(inst_a)?;
    let fb = trace_exp_map(inst_b)?;
    let (lambda, lhs, rhs) = worst_lambda(lambdas, |l| {
        let mixed: Vec<ComplexMatrix> = inst_a
            .a_ops
            .iter()
            .zip(&inst_b.a_ops)
            .map(|(a, b)| &a.scale(l) + &b.scale(1.0 - l))
            .collect();
        let fm = trace_exp_map(&inst_a.with_args(mixed)?)?;
        Ok((l * fa + (1.0 - l) * fb, fm))
    })?;
    Ok(InequalityReport::le("concavity", lhs, rhs, &[inst_a.dim()])
        .with_meta("lambda", lambda)
        .with_meta("kraus_count", inst_a.kraus.len())
        .with_meta("kraus_complete", inst_a.kraus.is_complete()))
}

/// `S[ρ] + Tr ρH ≤ ln Tr e^H`.
pub fn check_gibbs_variational(rho: &DensityMatrix, h: &ComplexMatrix) -> Result<InequalityReport> {
    if !h.is_square() || h.rows() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "H is {}x{} but the state has dimension {}",
            h.rows(),
            h.cols(),
            rho.dim()
        )));
    }
    let energy = rho.matrix().trace_product(h).re;
    let lhs = von_neumann(rho).nats + energy;
    let rhs = log_trace_exp(h)?;
    Ok(
        InequalityReport::le("gibbs", lhs, rhs, rho.dims().as_slice())
            .with_meta("hamiltonian_asymmetry", h.asymmetry()),
    )
}
