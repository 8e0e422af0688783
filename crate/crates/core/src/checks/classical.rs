use super::{worst_lambda, InequalityReport, EXPECTED_VIOLATION};
use crate::entropy::{
    classical_entropy, classical_entropy_single, classical_quantum_entropy, matrix_entropy,
    outcome_table, shannon, von_neumann,
};
use crate::error::{Error, Result};
use crate::linalg::{partial_trace_matrix, ComplexMatrix, DensityMatrix, HilbertDims};
use crate::measurement::{left_multiply_local, Povm, N_THRESHOLD};

fn require_bipartite(rho: &DensityMatrix) -> Result<()> {
    if rho.dims().factors() != 2 {
        return Err(Error::InvalidDims(format!(
            "expected a bipartite state, got dims {}",
            rho.dims()
        )));
    }
    Ok(())
}

fn require_povm_on(rho: &DensityMatrix, p: &Povm, factor: usize) -> Result<()> {
    let d = rho.dims().dim(factor);
    if p.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "POVM of dimension {} on factor {} of dimension {d}",
            p.dim(),
            factor + 1
        )));
    }
    Ok(())
}

/// Weights `n^α = Tr P^α ρ` and normalized states of the remaining factors
/// after measuring `p` on `factor` (0-based). Outcomes with
/// `n^α < 1e-12 · Tr ρ` are dropped.
pub fn conditional_states(
    rho: &DensityMatrix,
    p: &Povm,
    factor: usize,
) -> Result<Vec<(f64, DensityMatrix)>> {
    let dims = rho.dims();
    if dims.factors() < 2 || factor >= dims.factors() {
        return Err(Error::InvalidFactors(format!(
            "cannot measure factor {} of dims {dims}",
            factor + 1
        )));
    }
    require_povm_on(rho, p, factor)?;
    let rest: Vec<usize> = (0..dims.factors()).filter(|&f| f != factor).collect();
    let rest_dims = dims.select(&rest);
    let floor = N_THRESHOLD * rho.trace();
    let mut out = Vec::with_capacity(p.len());
    for pa in p.elements() {
        let x = left_multiply_local(pa, rho.matrix(), dims, &[factor]);
        let block = partial_trace_matrix(&x, dims, &rest)?.hermitian_part();
        let n = block.trace().re;
        if n < floor {
            continue;
        }
        out.push((
            n,
            DensityMatrix::from_trusted(block.scale(1.0 / n), rest_dims.clone(), false),
        ));
    }
    Ok(out)
}

fn average_entropy(ens: &[(f64, DensityMatrix)]) -> f64 {
    ens.iter().map(|(n, s)| n * von_neumann(s).nats).sum()
}

/// Both links of `S₁₂ ≤ S₁ + Σ n^α S[ρ₂^α] ≤ S₁ + S₂` for a POVM on factor 1.
pub fn check_improved_subadd(
    rho12: &DensityMatrix,
    p: &Povm,
) -> Result<(InequalityReport, InequalityReport)> {
    require_bipartite(rho12)?;
    let ens = conditional_states(rho12, p, 0)?;
    let s12 = von_neumann(rho12).nats;
    let s1 = von_neumann(&rho12.partial_trace(&[0])?).nats;
    let s2 = von_neumann(&rho12.partial_trace(&[1])?).nats;
    let middle = s1 + average_entropy(&ens);
    let dims = rho12.dims().as_slice();
    let left = InequalityReport::le("improved-subadd-left", s12, middle, dims)
        .with_meta("povm_len", p.len());
    let right = InequalityReport::le("improved-subadd-right", middle, s1 + s2, dims)
        .with_meta("povm_len", p.len());
    Ok((left, right))
}

/// `ρ₁₂ = d⁻¹ Σ_α |αα⟩⟨αα|`.
fn correlated_classical_state(d: usize) -> Result<DensityMatrix> {
    let mut probs = vec![0.0; d * d];
    for a in 0..d {
        probs[a * d + a] = 1.0 / d as f64;
    }
    DensityMatrix::diagonal(&probs, HilbertDims::new(vec![d, d])?)
}

/// The two-sided split `S₁₂ ≤ Σ n^α (S[ρ₁^α] + S[ρ₂^α])` evaluated on the
/// perfectly correlated classical state with basis projectors on both
/// factors. Returns `(S₁₂, Σ n^α (S[ρ₁^α] + S[ρ₂^α]))` = `(ln d, 0)`.
pub fn counterexample_two_sided(d: usize) -> Result<(f64, f64)> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "counterexample needs d ≥ 2, got {d}"
        )));
    }
    let rho = correlated_classical_state(d)?;
    let proj = Povm::basis(d);
    let given_1 = conditional_states(&rho, &proj, 0)?;
    let given_2 = conditional_states(&rho, &proj, 1)?;
    Ok((
        von_neumann(&rho).nats,
        average_entropy(&given_1) + average_entropy(&given_2),
    ))
}

/// [`counterexample_two_sided`] as a report labelled as an expected violation.
pub fn counterexample_report(d: usize) -> Result<InequalityReport> {
    let (lhs, rhs) = counterexample_two_sided(d)?;
    Ok(
        InequalityReport::le("counterexample-two-sided", lhs, rhs, &[d, d])
            .with_meta("label", EXPECTED_VIOLATION)
            .with_meta("d", d),
    )
}

fn row_sums(table: &[Vec<f64>]) -> Vec<f64> {
    table.iter().map(|r| r.iter().sum()).collect()
}

fn col_sums(table: &[Vec<f64>]) -> Vec<f64> {
    let cols = table.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| table.iter().map(|r| r[j]).sum())
        .collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Classical mutual information of `P ⊗ Q` outcomes ≤ quantum mutual
/// information. `lhs` is the classical side.
pub fn check_classical_mutual_info(
    rho12: &DensityMatrix,
    p: &Povm,
    q: &Povm,
) -> Result<InequalityReport> {
    require_bipartite(rho12)?;
    let rho1 = rho12.partial_trace(&[0])?;
    let rho2 = rho12.partial_trace(&[1])?;
    let table = outcome_table(rho12, p, q)?;
    let p1 = p.probabilities(rho1.matrix());
    let p2 = q.probabilities(rho2.matrix());
    let residual = max_diff(&p1, &row_sums(&table)).max(max_diff(&p2, &col_sums(&table)));
    let classical = shannon(&p1)?.nats + shannon(&p2)?.nats - shannon(&table.concat())?.nats;
    let quantum = von_neumann(&rho1).nats + von_neumann(&rho2).nats - von_neumann(rho12).nats;
    Ok(
        InequalityReport::le("mutual-info", classical, quantum, rho12.dims().as_slice())
            .with_meta("marginal_residual", residual),
    )
}

/// Both links of
/// `S₁₂ − S₁ − S₂ ≤ S^{cl,Q}₁₂ − S^{cl}₁ − S₂ ≤ S^{cl}₁₂ − S^{cl}₁ − S^{cl}₂`
/// with `p` on factor 1 and `q` on factor 2.
pub fn check_cq_chain(
    rho12: &DensityMatrix,
    p: &Povm,
    q: &Povm,
) -> Result<(InequalityReport, InequalityReport)> {
    require_bipartite(rho12)?;
    require_povm_on(rho12, p, 0)?;
    require_povm_on(rho12, q, 1)?;
    let rho1 = rho12.partial_trace(&[0])?;
    let rho2 = rho12.partial_trace(&[1])?;
    let s12 = von_neumann(rho12).nats;
    let s1 = von_neumann(&rho1).nats;
    let s2 = von_neumann(&rho2).nats;
    let cl1 = classical_entropy_single(&rho1, p)?.nats;
    let cl2 = classical_entropy_single(&rho2, q)?.nats;
    let clq = classical_quantum_entropy(rho12, p)?.nats;
    let cl12 = classical_entropy(rho12, p, q)?.nats;
    let quantum = s12 - s1 - s2;
    let hybrid = clq - cl1 - s2;
    let classical = cl12 - cl1 - cl2;
    let dims = rho12.dims().as_slice();
    Ok((
        InequalityReport::le("cq-chain-left", quantum, hybrid, dims),
        InequalityReport::le("cq-chain-right", hybrid, classical, dims),
    ))
}

/// `S₁₂₃ − S₁₂ ≤ S^{cl,Q,Q}[ρ₁₂₃] − S^{cl,Q}[ρ₁₂]` for a POVM on factor 1.
pub fn check_cqq(rho123: &DensityMatrix, p: &Povm) -> Result<InequalityReport> {
    if rho123.dims().factors() != 3 {
        return Err(Error::InvalidDims(format!(
            "expected a tripartite state, got dims {}",
            rho123.dims()
        )));
    }
    let rho12 = rho123.partial_trace(&[0, 1])?;
    let lhs = von_neumann(rho123).nats - von_neumann(&rho12).nats;
    let rhs =
        classical_quantum_entropy(rho123, p)?.nats - classical_quantum_entropy(&rho12, p)?.nats;
    Ok(
        InequalityReport::le("cqq", lhs, rhs, rho123.dims().as_slice())
            .with_meta("povm_len", p.len()),
    )
}

fn cl_minus_q(rho12: &DensityMatrix, p: &Povm) -> Result<f64> {
    Ok(classical_quantum_entropy(rho12, p)?.nats - von_neumann(rho12).nats)
}

/// Convexity of `G = S^{cl,Q} − S`: `G(λA + (1−λ)B) ≤ λG(A) + (1−λ)G(B)` at
/// the weight with the smallest slack.
pub fn check_convexity_cl_minus_q(
    a12: &DensityMatrix,
    b12: &DensityMatrix,
    p: &Povm,
    lambdas: &[f64],
) -> Result<InequalityReport> {
    require_bipartite(a12)?;
    if a12.dims() != b12.dims() {
        return Err(Error::DimensionMismatch(format!(
            "states have dims {} and {}",
            a12.dims(),
            b12.dims()
        )));
    }
    let ga = cl_minus_q(a12, p)?;
    let gb = cl_minus_q(b12, p)?;
    let (lambda, lhs, rhs) = worst_lambda(lambdas, |l| {
        let mixed = a12.mix(b12, l)?;
        Ok((cl_minus_q(&mixed, p)?, l * ga + (1.0 - l) * gb))
    })?;
    Ok(
        InequalityReport::le("convexity", lhs, rhs, a12.dims().as_slice())
            .with_meta("lambda", lambda),
    )
}

/// Accessible information `I(i : β)` of the ensemble `{w_i, ρ_i}` measured
/// with `q` is at most `χ = S[Σ w_i ρ_i] − Σ w_i S[ρ_i]`.
pub fn check_holevo(
    weights: &[f64],
    states: &[DensityMatrix],
    q: &Povm,
) -> Result<InequalityReport> {
    if weights.len() != states.len() || states.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} states",
            weights.len(),
            states.len()
        )));
    }
    let w_entropy = shannon(weights)?.nats;
    let dims = states[0].dims();
    if states.iter().any(|s| s.dims() != dims) {
        return Err(Error::DimensionMismatch(
            "ensemble states differ in dims".into(),
        ));
    }
    if q.dim() != dims.total() {
        return Err(Error::DimensionMismatch(format!(
            "POVM of dimension {} for states of dimension {}",
            q.dim(),
            dims.total()
        )));
    }
    let d = dims.total();
    let mut avg = ComplexMatrix::zeros(d, d);
    let mut joint = Vec::with_capacity(weights.len() * q.len());
    let mut avg_entropy = 0.0;
    for (&w, s) in weights.iter().zip(states) {
        avg = &avg + &s.matrix().scale(w);
        avg_entropy += w * von_neumann(s).nats;
        joint.extend(q.probabilities(s.matrix()).into_iter().map(|x| w * x));
    }
    let outcome = q.probabilities(&avg);
    let info = w_entropy + shannon(&outcome)?.nats - shannon(&joint)?.nats;
    let chi = matrix_entropy(&avg.hermitian_part()) - avg_entropy;
    Ok(InequalityReport::le("holevo", info, chi, dims.as_slice())
        .with_meta("ensemble_size", weights.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::{check_stronger_ssa, DEFAULT_LAMBDAS};
    use crate::linalg::C64;
    use crate::measurement::povm_to_kraus;
    use crate::random::{random_density, random_povm, Seed};

    fn dims(v: &[usize]) -> HilbertDims {
        HilbertDims::new(v.to_vec()).unwrap()
    }

    fn bell() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [
            C64::new(h, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(h, 0.0),
        ];
        DensityMatrix::pure(&psi, dims(&[2, 2])).unwrap()
    }

    #[test]
    fn trivial_povm_middle_is_sum_of_marginals() {
        let rho = random_density(&dims(&[2, 3]), 6, Seed(5)).unwrap();
        let (l, r) = check_improved_subadd(&rho, &Povm::trivial(2)).unwrap();
        assert!(r.slack.abs() < 1e-12);
        assert!(l.pass);
    }

    #[test]
    fn product_state_both_links_tight() {
        let a = random_density(&dims(&[2]), 2, Seed(1)).unwrap();
        let b = random_density(&dims(&[3]), 3, Seed(2)).unwrap();
        let p = random_povm(2, 3, Seed(3)).unwrap();
        let (l, r) = check_improved_subadd(&a.tensor(&b), &p).unwrap();
        assert!(r.slack.abs() < 1e-10);
        assert!(l.slack >= -1e-10);
    }

    #[test]
    fn counterexample_values() {
        for d in [2usize, 3, 5] {
            let (lhs, rhs) = counterexample_two_sided(d).unwrap();
            assert!((lhs - (d as f64).ln()).abs() < 1e-12);
            assert!(rhs.abs() < 1e-12);
        }
        assert!(counterexample_two_sided(1).is_err());
        let r = counterexample_report(3).unwrap();
        assert!(!r.pass && r.is_success());
    }

    #[test]
    fn bell_mutual_information() {
        let z = Povm::basis(2);
        let r = check_classical_mutual_info(&bell(), &z, &z).unwrap();
        let ln2 = 2f64.ln();
        assert!((r.rhs - 2.0 * ln2).abs() < 1e-12);
        assert!((r.lhs - ln2).abs() < 1e-12);
        assert!(r.meta_f64("marginal_residual").unwrap() < 1e-12);
    }

    #[test]
    fn classical_state_chain_is_tight() {
        let rho =
            DensityMatrix::diagonal(&[0.1, 0.2, 0.3, 0.15, 0.05, 0.2], dims(&[2, 3])).unwrap();
        let (l, r) = check_cq_chain(&rho, &Povm::basis(2), &Povm::basis(3)).unwrap();
        assert!(l.slack.abs() < 1e-12 && r.slack.abs() < 1e-12);
    }

    #[test]
    fn cqq_agrees_with_stronger_ssa() {
        let rho = random_density(&dims(&[2, 2, 2]), 8, Seed(11)).unwrap();
        let p = random_povm(2, 3, Seed(12)).unwrap();
        let a = check_cqq(&rho, &p).unwrap();
        let b = check_stronger_ssa(&rho, &povm_to_kraus(&p).unwrap()).unwrap();
        assert!((a.lhs - b.lhs).abs() < 1e-12);
        assert!((a.rhs - b.rhs).abs() < 1e-10);
    }

    #[test]
    fn convexity_equal_states_and_endpoints() {
        let a = random_density(&dims(&[2, 2]), 4, Seed(1)).unwrap();
        let b = random_density(&dims(&[2, 2]), 4, Seed(2)).unwrap();
        let p = random_povm(2, 3, Seed(3)).unwrap();
        assert!(
            check_convexity_cl_minus_q(&a, &a, &p, &DEFAULT_LAMBDAS)
                .unwrap()
                .slack
                .abs()
                < 1e-12
        );
        assert!(
            check_convexity_cl_minus_q(&a, &b, &p, &[0.0, 1.0])
                .unwrap()
                .slack
                .abs()
                < 1e-12
        );
        assert!(
            check_convexity_cl_minus_q(&a, &b, &p, &DEFAULT_LAMBDAS)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn holevo_extremes() {
        let s = random_density(&dims(&[3]), 3, Seed(4)).unwrap();
        let q = random_povm(3, 4, Seed(5)).unwrap();
        let r = check_holevo(&[0.3, 0.7], &[s.clone(), s], &q).unwrap();
        assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12);

        let w = [0.2, 0.5, 0.3];
        let states: Vec<_> = (0..3)
            .map(|k| {
                let mut p = [0.0; 3];
                p[k] = 1.0;
                DensityMatrix::diagonal(&p, dims(&[3])).unwrap()
            })
            .collect();
        let r = check_holevo(&w, &states, &Povm::basis(3)).unwrap();
        let h = shannon(&w).unwrap().nats;
        assert!((r.lhs - h).abs() < 1e-12 && (r.rhs - h).abs() < 1e-12);
    }

    #[test]
    fn dimension_errors() {
        let rho = random_density(&dims(&[2, 3]), 6, Seed(5)).unwrap();
        assert!(check_improved_subadd(&rho, &Povm::trivial(3)).is_err());
        assert!(check_cq_chain(&rho, &Povm::basis(2), &Povm::basis(2)).is_err());
        assert!(check_cqq(&rho, &Povm::basis(2)).is_err());
    }
}
