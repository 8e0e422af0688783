use super::InequalityReport;
use crate::entropy::{relative_entropy, von_neumann};
use crate::error::{Error, Result};
use crate::linalg::{partial_trace_matrix, DensityMatrix};
use crate::measurement::{
    check_completeness, conjugate_local, cpt_phi, measurement_ensemble, KrausSet,
    MeasurementEnsemble,
};

/// Entropies of a tripartite state and its reductions.
struct Reduced {
    s123: f64,
    s12: f64,
    s23: f64,
    s2: f64,
    s3: f64,
}

impl Reduced {
    fn of(rho: &DensityMatrix) -> Result<Self> {
        if rho.dims().factors() != 3 {
            return Err(Error::InvalidDims(format!(
                "expected a tripartite state, got dims {}",
                rho.dims()
            )));
        }
        Ok(Self {
            s123: von_neumann(rho).nats,
            s12: von_neumann(&rho.partial_trace(&[0, 1])?).nats,
            s23: von_neumann(&rho.partial_trace(&[1, 2])?).nats,
            s2: von_neumann(&rho.partial_trace(&[1])?).nats,
            s3: von_neumann(&rho.partial_trace(&[2])?).nats,
        })
    }

    fn conditional_12(&self) -> f64 {
        self.s123 - self.s12
    }

    fn conditional_2(&self) -> f64 {
        self.s23 - self.s2
    }
}

fn ensemble_middle(ens: &MeasurementEnsemble) -> f64 {
    ens.entries
        .iter()
        .map(|e| e.weight * (von_neumann(&e.rho23).nats - von_neumann(&e.rho2).nats))
        .sum()
}

fn annotate(
    r: InequalityReport,
    rho: &DensityMatrix,
    k: &KrausSet,
    ens: &MeasurementEnsemble,
) -> InequalityReport {
    r.with_meta("kraus_count", k.len())
        .with_meta(
            "kraus_acts_on",
            k.acts_on().iter().map(|f| f + 1).collect::<Vec<_>>(),
        )
        .with_meta("completeness_residual", check_completeness(k))
        .with_meta("skipped_terms", ens.skipped)
        .with_meta("skipped_mass", ens.skipped_mass)
        .with_meta("input_asymmetry", rho.matrix().asymmetry())
}

/// `S₁₂₃ − S₁₂ ≤ S₂₃ − S₂`.
pub fn check_ssa(rho123: &DensityMatrix) -> Result<InequalityReport> {
    let s = Reduced::of(rho123)?;
    Ok(InequalityReport::le(
        "ssa",
        s.conditional_12(),
        s.conditional_2(),
        rho123.dims().as_slice(),
    )
    .with_meta("input_asymmetry", rho123.matrix().asymmetry()))
}

/// `S₁₂₃ − S₁₂ ≤ Σ_α n^α (S[ρ₂₃^α] − S[ρ₂^α])` for a complete Kraus set on
/// factor 1 or factors 1,2.
pub fn check_stronger_ssa(rho123: &DensityMatrix, k: &KrausSet) -> Result<InequalityReport> {
    let s = Reduced::of(rho123)?;
    let ens = measurement_ensemble(rho123, k)?;
    let r = InequalityReport::le(
        "stronger-ssa",
        s.conditional_12(),
        ensemble_middle(&ens),
        rho123.dims().as_slice(),
    );
    Ok(annotate(r, rho123, k, &ens))
}

/// Same quantities as [`check_stronger_ssa`] for a Kraus set that need not be
/// complete (`Σ K†K ≤ I`). Weights are left unnormalized. Output is
/// informational only: completeness is required for the inequality.
pub fn stronger_ssa_exploratory(rho123: &DensityMatrix, k: &KrausSet) -> Result<InequalityReport> {
    let s = Reduced::of(rho123)?;
    let dims = rho123.dims();
    let mut middle = 0.0;
    let mut mass = 0.0;
    for op in k.ops() {
        let y = conjugate_local(op, rho123.matrix(), dims, k.acts_on());
        let n = y.trace().re;
        mass += n;
        if n < crate::measurement::N_THRESHOLD {
            continue;
        }
        let b23 = partial_trace_matrix(&y, dims, &[1, 2])?.scale(1.0 / n);
        let b2 = partial_trace_matrix(&y, dims, &[1])?.scale(1.0 / n);
        middle += n * (crate::entropy::matrix_entropy(&b23) - crate::entropy::matrix_entropy(&b2));
    }
    Ok(InequalityReport::le(
        "stronger-ssa-exploratory",
        s.conditional_12(),
        middle,
        dims.as_slice(),
    )
    .with_meta("exploratory", true)
    .with_meta("retained_mass", mass)
    .with_meta("completeness_residual", check_completeness(k)))
}

/// Both links of
/// `S₁₂₃ − S₁₂ ≤ Σ n^α (S[ρ₂₃^α] − S[ρ₂^α]) ≤ S₂₃ − S₂`
/// for a Kraus set acting on factor 1 only.
pub fn check_sandwich(
    rho123: &DensityMatrix,
    k: &KrausSet,
) -> Result<(InequalityReport, InequalityReport)> {
    if k.acts_on() != [0] {
        return Err(Error::InvalidFactors(format!(
            "sandwich needs a Kraus set on factor 1 only, got {:?}",
            k.acts_on().iter().map(|f| f + 1).collect::<Vec<_>>()
        )));
    }
    let s = Reduced::of(rho123)?;
    let ens = measurement_ensemble(rho123, k)?;
    let middle = ensemble_middle(&ens);
    let dims = rho123.dims().as_slice();
    let left = InequalityReport::le("sandwich-left", s.conditional_12(), middle, dims);
    let right = InequalityReport::le("sandwich-right", middle, s.conditional_2(), dims);
    Ok((
        annotate(left, rho123, k, &ens),
        annotate(right, rho123, k, &ens),
    ))
}

/// Monotonicity `H(Φρ₁₂₃, Φ(ρ₁₂⊗ρ₃)) ≤ H(ρ₁₂₃, ρ₁₂⊗ρ₃)` under the
/// block-diagonal channel. `lhs` is the image side. Meta records
/// `identity_residual = |lhs − Σ n^α(S[ρ₂^α] − S[ρ₂₃^α] + S[ρ₃])|` and
/// `input_identity_residual = |rhs − (S₁₂ + S₃ − S₁₂₃)|`.
pub fn check_cpt_monotonicity(rho123: &DensityMatrix, k: &KrausSet) -> Result<InequalityReport> {
    let s = Reduced::of(rho123)?;
    let dims = rho123.dims().as_slice();
    let product = rho123
        .partial_trace(&[0, 1])?
        .tensor(&rho123.partial_trace(&[2])?);
    let before = relative_entropy(rho123, &product)?;
    let phi_rho = cpt_phi(rho123, k)?;
    let phi_product = cpt_phi(&product, k)?;
    let after = relative_entropy(&phi_rho, &phi_product)?;
    if !before.finite || !after.finite {
        return Ok(InequalityReport::skipped("cpt", dims, "support"));
    }
    let ens = measurement_ensemble(rho123, k)?;
    let identity: f64 = ens
        .entries
        .iter()
        .map(|e| e.weight * (von_neumann(&e.rho2).nats - von_neumann(&e.rho23).nats + s.s3))
        .sum();
    let input_side = s.s12 + s.s3 - s.s123;
    let r = InequalityReport::le("cpt", after.nats, before.nats, dims)
        .with_meta("identity_residual", (after.nats - identity).abs())
        .with_meta("input_identity_residual", (before.nats - input_side).abs());
    Ok(annotate(r, rho123, k, &ens))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMatrix, HilbertDims, C64};
    use crate::random::{random_density, random_kraus, random_product_density, Seed};

    fn dims(v: &[usize]) -> HilbertDims {
        HilbertDims::new(v.to_vec()).unwrap()
    }

    fn ghz() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi = vec![C64::new(0.0, 0.0); 8];
        psi[0] = C64::new(s, 0.0);
        psi[7] = C64::new(s, 0.0);
        DensityMatrix::pure(&psi, dims(&[2, 2, 2])).unwrap()
    }

    #[test]
    fn ssa_product_saturates() {
        let rho = random_product_density(&dims(&[2, 3, 2]), Seed(5)).unwrap();
        let r = check_ssa(&rho).unwrap();
        assert!(r.slack.abs() < 1e-9);
        assert!(r.pass);
    }

    #[test]
    fn ssa_ghz_values() {
        let r = check_ssa(&ghz()).unwrap();
        let ln2 = 2f64.ln();
        assert!((r.lhs + ln2).abs() < 1e-12);
        assert!(r.rhs.abs() < 1e-12);
        assert!(r.pass);
    }

    #[test]
    fn ssa_requires_three_factors() {
        let rho = DensityMatrix::maximally_mixed(dims(&[2, 2]));
        assert!(matches!(check_ssa(&rho), Err(Error::InvalidDims(_))));
    }

    #[test]
    fn identity_kraus_reduces_to_ssa() {
        let rho = random_density(&dims(&[2, 2, 2]), 8, Seed(1)).unwrap();
        let k = KrausSet::identity(4, vec![0, 1]).unwrap();
        let a = check_stronger_ssa(&rho, &k).unwrap();
        let b = check_ssa(&rho).unwrap();
        assert!((a.lhs - b.lhs).abs() < 1e-12);
        assert!((a.rhs - b.rhs).abs() < 1e-12);
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let rho = random_density(&dims(&[2, 2, 2]), 8, Seed(1)).unwrap();
        let k = KrausSet::sub_complete(vec![ComplexMatrix::identity(4).scale(0.5)], vec![0, 1])
            .unwrap();
        assert!(matches!(
            check_stronger_ssa(&rho, &k),
            Err(Error::Incomplete(_))
        ));
        let r = stronger_ssa_exploratory(&rho, &k).unwrap();
        assert!((r.meta_f64("retained_mass").unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn sandwich_identity_collapses() {
        let rho = random_density(&dims(&[2, 2, 2]), 8, Seed(2)).unwrap();
        let k = KrausSet::identity(2, vec![0]).unwrap();
        let (l, r) = check_sandwich(&rho, &k).unwrap();
        assert!(r.slack.abs() < 1e-12);
        assert!(l.pass && r.pass);
        let wrong = KrausSet::identity(4, vec![0, 1]).unwrap();
        assert!(check_sandwich(&rho, &wrong).is_err());
    }

    #[test]
    fn sandwich_product_state() {
        let d = dims(&[2, 2, 2]);
        let rho1 = random_density(&dims(&[2]), 2, Seed(3)).unwrap();
        let rho23 = random_density(&dims(&[2, 2]), 4, Seed(4)).unwrap();
        let rho = DensityMatrix::new(rho1.tensor(&rho23).into_matrix(), d).unwrap();
        let k = random_kraus(2, 3, Seed(5)).unwrap();
        let (l, r) = check_sandwich(&rho, &k).unwrap();
        let cond2 = r.rhs;
        assert!((r.lhs - cond2).abs() < 1e-9);
        assert!(l.slack.abs() < 1e-9 && r.slack.abs() < 1e-9);
    }

    #[test]
    fn cpt_identity_kraus_gap_is_ssa_slack() {
        let rho = random_density(&dims(&[2, 2, 2]), 8, Seed(6)).unwrap();
        let k = KrausSet::identity(4, vec![0, 1]).unwrap();
        let cpt = check_cpt_monotonicity(&rho, &k).unwrap();
        let ssa = check_ssa(&rho).unwrap();
        assert!((cpt.slack - ssa.slack).abs() < 1e-9);
        assert!(cpt.meta_f64("identity_residual").unwrap() < 1e-8);
    }

    #[test]
    fn cpt_product_state_is_zero() {
        let rho = random_product_density(&dims(&[2, 2, 3]), Seed(7)).unwrap();
        let k = random_kraus(4, 2, Seed(8))
            .unwrap()
            .with_acts_on(vec![0, 1])
            .unwrap();
        let r = check_cpt_monotonicity(&rho, &k).unwrap();
        assert!(r.lhs.abs() < 1e-9 && r.rhs.abs() < 1e-9);
        assert!(r.slack.abs() < 1e-9);
    }

    #[test]
    fn cpt_rank_deficient_input_stays_finite() {
        // supp ρ₁₂₃ ⊆ supp ρ₁₂ ⊗ supp ρ₃, so the sentinel never fires on valid input.
        let k = KrausSet::basis_projectors(4, vec![0, 1]).unwrap();
        let r = check_cpt_monotonicity(&ghz(), &k).unwrap();
        assert_eq!(r.status, super::super::Status::Ok);
        assert!(r.pass);
        assert!(r.meta_f64("identity_residual").unwrap() < 1e-8);
    }
}
