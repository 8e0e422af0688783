//! Kraus sets, POVMs, post-measurement ensembles and the block-diagonal
//! channel `Φ(ρ₁₂₃) = ⊕_α n^α ρ₂₃^α`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, kron, partial_trace_matrix, sqrt_psd, ComplexMatrix, DensityMatrix, HilbertDims,
    C64, ZERO,
};

pub const DEFAULT_KRAUS_TOL: f64 = 1e-10;
pub const DEFAULT_POVM_TOL: f64 = 1e-9;

/// Weights below this fraction of `Tr ρ` are dropped from an ensemble.
pub const N_THRESHOLD: f64 = 1e-12;

/// Above this total dimension, local operators are applied by index
/// arithmetic instead of materializing `I ⊗ K ⊗ I`.
pub const MATERIALIZE_LIMIT: usize = 16;

/// Finite family of equally sized square operators acting on a contiguous
/// run of tensor factors.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    ops: Vec<ComplexMatrix>,
    acts_on: Vec<usize>,
    tol: f64,
    complete: bool,
}

impl KrausSet {
    /// Complete set: `Σ K†K = I` within [`DEFAULT_KRAUS_TOL`].
    pub fn new(ops: Vec<ComplexMatrix>, acts_on: Vec<usize>) -> Result<Self> {
        Self::with_tol(ops, acts_on, DEFAULT_KRAUS_TOL)
    }

    pub fn with_tol(ops: Vec<ComplexMatrix>, acts_on: Vec<usize>, tol: f64) -> Result<Self> {
        let set = Self::unchecked(ops, acts_on, tol, true)?;
        let r = check_completeness(&set);
        if r > tol {
            return Err(Error::Incomplete(r));
        }
        Ok(set)
    }

    /// Sub-complete set: `I − Σ K†K` PSD within [`DEFAULT_KRAUS_TOL`].
    pub fn sub_complete(ops: Vec<ComplexMatrix>, acts_on: Vec<usize>) -> Result<Self> {
        let set = Self::unchecked(ops, acts_on, DEFAULT_KRAUS_TOL, false)?;
        let gap = &ComplexMatrix::identity(set.dim()) - &set.gram_sum();
        let min = hermitian_eig(&gap)?.min_value();
        if min < -set.tol {
            return Err(Error::Incomplete(-min));
        }
        let complete = check_completeness(&set) <= set.tol;
        Ok(Self { complete, ..set })
    }

    fn unchecked(
        ops: Vec<ComplexMatrix>,
        acts_on: Vec<usize>,
        tol: f64,
        complete: bool,
    ) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus set".into()))?;
        let d = first.rows();
        if let Some(k) = ops.iter().find(|k| !k.is_square() || k.rows() != d) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator of shape {}x{} in a set of {d}x{d} operators",
                k.rows(),
                k.cols()
            )));
        }
        validate_acts_on(&acts_on)?;
        Ok(Self {
            ops,
            acts_on,
            tol,
            complete,
        })
    }

    /// Same operators relabelled to act on `acts_on`.
    pub fn with_acts_on(self, acts_on: Vec<usize>) -> Result<Self> {
        validate_acts_on(&acts_on)?;
        Ok(Self { acts_on, ..self })
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn acts_on(&self) -> &[usize] {
        &self.acts_on
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn identity(dim: usize, acts_on: Vec<usize>) -> Result<Self> {
        Self::new(vec![ComplexMatrix::identity(dim)], acts_on)
    }

    /// Rank-one projectors onto the computational basis.
    pub fn basis_projectors(dim: usize, acts_on: Vec<usize>) -> Result<Self> {
        Self::new(basis_projectors(dim), acts_on)
    }

    /// `Σ K†K`.
    pub fn gram_sum(&self) -> ComplexMatrix {
        let d = self.dim();
        self.ops.iter().fold(ComplexMatrix::zeros(d, d), |acc, k| {
            &acc + &(&k.adjoint() * k)
        })
    }

    fn check_against(&self, dims: &HilbertDims) -> Result<()> {
        if let Some(&f) = self.acts_on.iter().find(|&&f| f >= dims.factors()) {
            return Err(Error::InvalidFactors(format!(
                "Kraus set acts on factor {f} of a state with dims {dims}"
            )));
        }
        let expect = dims.subsystem_total(&self.acts_on);
        if expect != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators are {0}x{0} but factors {1:?} of {dims} span {expect}",
                self.dim(),
                self.acts_on
            )));
        }
        Ok(())
    }
}

fn validate_acts_on(acts_on: &[usize]) -> Result<()> {
    if acts_on.is_empty() {
        return Err(Error::InvalidFactors("Kraus set acts on no factor".into()));
    }
    if acts_on.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(Error::InvalidFactors(format!(
            "acts_on {acts_on:?} must be a contiguous ascending run of factors"
        )));
    }
    Ok(())
}

fn basis_projectors(dim: usize) -> Vec<ComplexMatrix> {
    (0..dim)
        .map(|k| {
            let mut p = ComplexMatrix::zeros(dim, dim);
            p[(k, k)] = C64::new(1.0, 0.0);
            p
        })
        .collect()
}

/// Max-abs entry of `Σ K†K − I`.
pub fn check_completeness(k: &KrausSet) -> f64 {
    k.gram_sum().max_abs_diff(&ComplexMatrix::identity(k.dim()))
}

/// Positive operators summing to the identity on one space.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
    tol: f64,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tol(elements, DEFAULT_POVM_TOL)
    }

    pub fn with_tol(elements: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty POVM".into()))?;
        let d = first.rows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for p in &elements {
            if !p.is_square() || p.rows() != d {
                return Err(Error::DimensionMismatch(format!(
                    "POVM element of shape {}x{} in a {d}-dimensional POVM",
                    p.rows(),
                    p.cols()
                )));
            }
            let min = hermitian_eig(p)?.min_value();
            if min < -tol {
                return Err(Error::NotPsd(min));
            }
            sum = &sum + p;
        }
        let r = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if r > tol {
            return Err(Error::Incomplete(r));
        }
        Ok(Self { elements, tol })
    }

    /// `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            elements: vec![ComplexMatrix::identity(dim)],
            tol: DEFAULT_POVM_TOL,
        }
    }

    /// Rank-one projectors onto the computational basis.
    pub fn basis(dim: usize) -> Self {
        Self {
            elements: basis_projectors(dim),
            tol: DEFAULT_POVM_TOL,
        }
    }

    /// Projectors `|u_k⟩⟨u_k|` onto the columns of a unitary.
    pub fn from_unitary(u: &ComplexMatrix) -> Result<Self> {
        let els = (0..u.cols())
            .map(|k| ComplexMatrix::outer(&u.column(k)))
            .collect();
        Self::new(els)
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Outcome probabilities `Tr P^α ρ` on a single-factor state.
    pub fn probabilities(&self, rho: &ComplexMatrix) -> Vec<f64> {
        self.elements
            .iter()
            .map(|p| p.trace_product(rho).re)
            .collect()
    }
}

/// `K^α = (P^α)^{1/2}` acting on factor 0.
pub fn povm_to_kraus(p: &Povm) -> Result<KrausSet> {
    let ops = p
        .elements()
        .iter()
        .map(|e| sqrt_psd(e, p.tol()))
        .collect::<Result<Vec<_>>>()?;
    KrausSet::with_tol(ops, vec![0], p.tol().max(DEFAULT_KRAUS_TOL))
}

/// Split of `dims` around a contiguous run of factors: (left, local, right).
fn local_layout(dims: &HilbertDims, acts_on: &[usize]) -> (usize, usize, usize) {
    let d = dims.as_slice();
    let first = acts_on[0];
    let last = acts_on[acts_on.len() - 1];
    let left: usize = d[..first].iter().product();
    let local: usize = d[first..=last].iter().product();
    let right: usize = d[last + 1..].iter().product();
    (left, local, right)
}

/// `(I ⊗ K ⊗ I) · M` by index arithmetic.
pub fn left_multiply_local(
    k: &ComplexMatrix,
    m: &ComplexMatrix,
    dims: &HilbertDims,
    acts_on: &[usize],
) -> ComplexMatrix {
    let (left, local, right) = local_layout(dims, acts_on);
    let n = m.cols();
    let mut out = ComplexMatrix::zeros(m.rows(), n);
    for l in 0..left {
        for a in 0..local {
            for r in 0..right {
                let row = (l * local + a) * right + r;
                for c in 0..local {
                    let kac = k[(a, c)];
                    if kac == ZERO {
                        continue;
                    }
                    let src = m.row((l * local + c) * right + r);
                    let dst = &mut out.as_mut_slice()[row * n..(row + 1) * n];
                    for (o, s) in dst.iter_mut().zip(src) {
                        *o += kac * s;
                    }
                }
            }
        }
    }
    out
}

/// `M · (I ⊗ K ⊗ I)†` by index arithmetic.
fn right_multiply_local_adjoint(
    k: &ComplexMatrix,
    m: &ComplexMatrix,
    dims: &HilbertDims,
    acts_on: &[usize],
) -> ComplexMatrix {
    let (left, local, right) = local_layout(dims, acts_on);
    let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
    for row in 0..m.rows() {
        let src = m.row(row);
        for l in 0..left {
            for b in 0..local {
                for r in 0..right {
                    let mut acc = ZERO;
                    for e in 0..local {
                        let kbe = k[(b, e)];
                        if kbe == ZERO {
                            continue;
                        }
                        acc += src[(l * local + e) * right + r] * kbe.conj();
                    }
                    out[(row, (l * local + b) * right + r)] = acc;
                }
            }
        }
    }
    out
}

/// `(I ⊗ K ⊗ I) ρ (I ⊗ K ⊗ I)†` without forming the extended operator.
pub fn conjugate_local_indexed(
    k: &ComplexMatrix,
    rho: &ComplexMatrix,
    dims: &HilbertDims,
    acts_on: &[usize],
) -> ComplexMatrix {
    let x = left_multiply_local(k, rho, dims, acts_on);
    right_multiply_local_adjoint(k, &x, dims, acts_on)
}

/// Same as [`conjugate_local_indexed`] through the explicit Kronecker product.
pub fn conjugate_local_materialized(
    k: &ComplexMatrix,
    rho: &ComplexMatrix,
    dims: &HilbertDims,
    acts_on: &[usize],
) -> ComplexMatrix {
    let (left, _, right) = local_layout(dims, acts_on);
    let full = kron(
        &kron(&ComplexMatrix::identity(left), k),
        &ComplexMatrix::identity(right),
    );
    &(&full * rho) * &full.adjoint()
}

pub fn conjugate_local(
    k: &ComplexMatrix,
    rho: &ComplexMatrix,
    dims: &HilbertDims,
    acts_on: &[usize],
) -> ComplexMatrix {
    if dims.total() > MATERIALIZE_LIMIT {
        conjugate_local_indexed(k, rho, dims, acts_on)
    } else {
        conjugate_local_materialized(k, rho, dims, acts_on)
    }
}

/// One retained outcome of a measurement.
#[derive(Clone, Debug)]
pub struct EnsembleEntry {
    /// Position of the outcome in the Kraus set.
    pub index: usize,
    pub weight: f64,
    pub rho23: DensityMatrix,
    pub rho2: DensityMatrix,
}

/// Weights and conditional states `{(n^α, ρ₂₃^α, ρ₂^α)}`.
#[derive(Clone, Debug)]
pub struct MeasurementEnsemble {
    pub entries: Vec<EnsembleEntry>,
    pub skipped: usize,
    pub skipped_mass: f64,
}

impl MeasurementEnsemble {
    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.weight).collect()
    }
}

fn check_tripartite(rho: &DensityMatrix, k: &KrausSet) -> Result<()> {
    if rho.dims().factors() != 3 {
        return Err(Error::InvalidDims(format!(
            "expected a tripartite state, got dims {}",
            rho.dims()
        )));
    }
    if k.acts_on()[0] != 0 || k.acts_on().len() > 2 {
        return Err(Error::InvalidFactors(format!(
            "Kraus set must act on {{1}} or {{1,2}}, got {:?}",
            k.acts_on().iter().map(|f| f + 1).collect::<Vec<_>>()
        )));
    }
    k.check_against(rho.dims())?;
    let r = check_completeness(k);
    if r > k.tol() {
        return Err(Error::Incomplete(r));
    }
    Ok(())
}

/// Unnormalized blocks `Tr₁ K^α ρ₁₂₃ K^{α*}` on factors (2,3).
fn conditional_blocks(rho: &DensityMatrix, k: &KrausSet) -> Result<Vec<ComplexMatrix>> {
    k.ops()
        .iter()
        .map(|op| {
            let y = conjugate_local(op, rho.matrix(), rho.dims(), k.acts_on());
            partial_trace_matrix(&y, rho.dims(), &[1, 2])
        })
        .collect()
}

pub fn measurement_ensemble(rho123: &DensityMatrix, k: &KrausSet) -> Result<MeasurementEnsemble> {
    check_tripartite(rho123, k)?;
    let dims23 = rho123.dims().select(&[1, 2]);
    let cutoff = N_THRESHOLD * rho123.trace();
    let mut entries = Vec::new();
    let mut skipped = 0;
    let mut skipped_mass = 0.0;
    for (index, block) in conditional_blocks(rho123, k)?.into_iter().enumerate() {
        let n = block.trace().re;
        if n < cutoff {
            skipped += 1;
            skipped_mass += n.max(0.0);
            continue;
        }
        let rho23 = DensityMatrix::from_trusted(block.scale(1.0 / n), dims23.clone(), false);
        let rho2 = rho23.partial_trace(&[0])?;
        entries.push(EnsembleEntry {
            index,
            weight: n,
            rho23,
            rho2,
        });
    }
    Ok(MeasurementEnsemble {
        entries,
        skipped,
        skipped_mass,
    })
}

/// `⊕_α Tr₁ K^α ρ K^{α*}` on `ℂ^M ⊗ ℋ₂ ⊗ ℋ₃`.
pub fn cpt_phi(rho123: &DensityMatrix, k: &KrausSet) -> Result<DensityMatrix> {
    check_tripartite(rho123, k)?;
    let blocks = conditional_blocks(rho123, k)?;
    let (d2, d3) = (rho123.dims().dim(1), rho123.dims().dim(2));
    let b = d2 * d3;
    let m = blocks.len();
    let mut out = ComplexMatrix::zeros(m * b, m * b);
    for (a, block) in blocks.iter().enumerate() {
        for i in 0..b {
            for j in 0..b {
                out[(a * b + i, a * b + j)] = block[(i, j)];
            }
        }
    }
    Ok(DensityMatrix::from_trusted(
        out,
        HilbertDims::new(vec![m, d2, d3])?,
        rho123.is_unnormalized(),
    ))
}

#[derive(Serialize, Deserialize)]
struct OpsJson {
    acts_on: Vec<usize>,
    ops: Vec<ComplexMatrix>,
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|f| f + 1).collect()
}

fn zero_based(v: &[usize]) -> std::result::Result<Vec<usize>, String> {
    v.iter()
        .map(|&f| {
            f.checked_sub(1)
                .ok_or_else(|| "acts_on indices are 1-based".to_string())
        })
        .collect()
}

impl Serialize for KrausSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OpsJson {
            acts_on: one_based(&self.acts_on),
            ops: self.ops.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KrausSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = OpsJson::deserialize(d)?;
        let acts_on = zero_based(&j.acts_on).map_err(D::Error::custom)?;
        KrausSet::new(j.ops, acts_on).map_err(D::Error::custom)
    }
}

impl Serialize for Povm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OpsJson {
            acts_on: vec![1],
            ops: self.elements.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Povm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = OpsJson::deserialize(d)?;
        Povm::new(j.ops).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_kraus, random_povm, random_unitary, Seed};

    fn dims(v: &[usize]) -> HilbertDims {
        HilbertDims::new(v.to_vec()).unwrap()
    }

    #[test]
    fn completeness_of_identity_and_scaled_unitaries() {
        let k = KrausSet::identity(3, vec![0]).unwrap();
        assert_eq!(check_completeness(&k), 0.0);
        let u = random_unitary(3, Seed(11)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let k = KrausSet::new(
            vec![ComplexMatrix::identity(3).scale(s), u.scale(s)],
            vec![0],
        )
        .unwrap();
        assert!(check_completeness(&k) < 1e-15);
    }

    #[test]
    fn incomplete_set_rejected() {
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert!(matches!(
            KrausSet::new(vec![half.clone()], vec![0]),
            Err(Error::Incomplete(_))
        ));
        let sub = KrausSet::sub_complete(vec![half], vec![0]).unwrap();
        assert!(!sub.is_complete());
        assert!(
            KrausSet::sub_complete(vec![ComplexMatrix::identity(2).scale(1.1)], vec![0]).is_err()
        );
    }

    #[test]
    fn acts_on_must_be_contiguous() {
        assert!(KrausSet::identity(2, vec![0, 2]).is_err());
        assert!(KrausSet::identity(2, vec![]).is_err());
    }

    #[test]
    fn identity_measurement_is_single_entry() {
        let d = dims(&[2, 2, 2]);
        let rho = random_density(&d, 8, Seed(1)).unwrap();
        let k = KrausSet::identity(4, vec![0, 1]).unwrap();
        let ens = measurement_ensemble(&rho, &k).unwrap();
        assert_eq!(ens.entries.len(), 1);
        assert!((ens.entries[0].weight - 1.0).abs() < 1e-12);
        let r23 = rho.partial_trace(&[1, 2]).unwrap();
        assert!(ens.entries[0].rho23.matrix().max_abs_diff(r23.matrix()) < 1e-12);
    }

    #[test]
    fn kraus_dimension_mismatch() {
        let rho = random_density(&dims(&[2, 2, 2]), 8, Seed(1)).unwrap();
        let k = KrausSet::identity(3, vec![0]).unwrap();
        assert!(matches!(
            measurement_ensemble(&rho, &k),
            Err(Error::DimensionMismatch(_))
        ));
        let k = KrausSet::identity(2, vec![2]).unwrap();
        assert!(matches!(
            measurement_ensemble(&rho, &k),
            Err(Error::InvalidFactors(_))
        ));
    }

    #[test]
    fn indexed_and_materialized_paths_agree() {
        for (case, d) in [vec![2, 3, 2], vec![3, 2, 2], vec![2, 2, 3]]
            .into_iter()
            .enumerate()
        {
            let hd = dims(&d);
            let rho = random_density(&hd, hd.total(), Seed(case as u64)).unwrap();
            for acts_on in [vec![0], vec![0, 1], vec![1], vec![1, 2], vec![2]] {
                let kd = hd.subsystem_total(&acts_on);
                let k = random_kraus(kd, 2, Seed(100 + case as u64)).unwrap();
                for op in k.ops() {
                    let a = conjugate_local_indexed(op, rho.matrix(), &hd, &acts_on);
                    let b = conjugate_local_materialized(op, rho.matrix(), &hd, &acts_on);
                    assert!(a.max_abs_diff(&b) < 1e-13, "{d:?} {acts_on:?}");
                }
            }
        }
    }

    #[test]
    fn cyclicity_of_weights() {
        let hd = dims(&[2, 3, 2]);
        let rho = random_density(&hd, 12, Seed(8)).unwrap();
        let k = random_kraus(6, 3, Seed(9))
            .unwrap()
            .with_acts_on(vec![0, 1])
            .unwrap();
        let ens = measurement_ensemble(&rho, &k).unwrap();
        assert!((ens.total_weight() - 1.0).abs() < 1e-10);
        for e in &ens.entries {
            let op = &k.ops()[e.index];
            let kk = kron(&(&op.adjoint() * op), &ComplexMatrix::identity(2));
            let n = kk.trace_product(rho.matrix()).re;
            assert!((n - e.weight).abs() < 1e-12);
            let r2 = e.rho23.partial_trace(&[0]).unwrap();
            assert!(r2.matrix().max_abs_diff(e.rho2.matrix()) < 1e-10);
        }
    }

    #[test]
    fn mixing_identity_for_factor_one_kraus() {
        let hd = dims(&[3, 2, 2]);
        let rho = random_density(&hd, 12, Seed(21)).unwrap();
        let k = random_kraus(3, 4, Seed(22)).unwrap();
        let ens = measurement_ensemble(&rho, &k).unwrap();
        let mut mix = ComplexMatrix::zeros(4, 4);
        for e in &ens.entries {
            mix = &mix + &e.rho23.matrix().scale(e.weight);
        }
        let r23 = rho.partial_trace(&[1, 2]).unwrap();
        assert!(mix.max_abs_diff(r23.matrix()) < 1e-10);
    }

    #[test]
    fn phi_preserves_trace_and_positivity() {
        let hd = dims(&[2, 2, 3]);
        let rho = random_density(&hd, 6, Seed(4)).unwrap();
        let k = random_kraus(4, 3, Seed(5))
            .unwrap()
            .with_acts_on(vec![0, 1])
            .unwrap();
        let phi = cpt_phi(&rho, &k).unwrap();
        assert_eq!(phi.dims().as_slice(), &[3, 2, 3]);
        assert!((phi.trace() - 1.0).abs() < 1e-10);
        assert!(phi.eigen().unwrap().min_value() > -1e-10);
    }

    #[test]
    fn povm_square_roots() {
        let p = Povm::basis(3);
        let k = povm_to_kraus(&p).unwrap();
        for (a, b) in k.ops().iter().zip(p.elements()) {
            assert!(a.max_abs_diff(b) < 1e-15);
        }
        let k = povm_to_kraus(&Povm::trivial(2)).unwrap();
        assert!(k.ops()[0].max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        let p = random_povm(4, 3, Seed(31)).unwrap();
        assert!(check_completeness(&povm_to_kraus(&p).unwrap()) <= 1e-10);
    }

    #[test]
    fn povm_validation() {
        let bad = vec![
            ComplexMatrix::from_real_diag(&[1.5, 1.0]),
            ComplexMatrix::from_real_diag(&[-0.5, 0.0]),
        ];
        assert!(matches!(Povm::new(bad), Err(Error::NotPsd(_))));
        let short = vec![ComplexMatrix::from_real_diag(&[0.5, 1.0])];
        assert!(matches!(Povm::new(short), Err(Error::Incomplete(_))));
    }

    #[test]
    fn json_forms_are_one_based() {
        let k = KrausSet::identity(4, vec![0, 1]).unwrap();
        let s = serde_json::to_string(&k).unwrap();
        assert!(s.starts_with(r#"{"acts_on":[1,2],"ops":[{"rows":4"#));
        let back: KrausSet = serde_json::from_str(&s).unwrap();
        assert_eq!(back, k);
        assert!(serde_json::from_str::<KrausSet>(&s.replace("[1,2]", "[0,1]")).is_err());
    }
}
