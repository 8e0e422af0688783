//! Seeded generators for every random object used by the check suites.
//!
//! All randomness comes from ChaCha20 (`rand_chacha::ChaCha20Rng`), keyed by
//! `seed_from_u64(seed)` and split into independent substreams with
//! `set_stream(k)`. A generator that needs several independent objects draws
//! object `k` from substream `k`. Per-instance seeds of a suite are derived
//! from the base seed with [`Seed::derive`] (SplitMix64).
//!
//! Complex Gaussians use the Box–Muller transform on two uniforms
//! `u₁ ∈ (0,1]`, `u₂ ∈ [0,1)`: `r = √(−2 ln u₁)`, `z = r·(cos 2πu₂ + i sin 2πu₂)/√2`,
//! so real and imaginary parts are independent `N(0, ½)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, inv_sqrt_pd, kron, ComplexMatrix, DensityMatrix, HilbertDims, C64,
};
use crate::measurement::{KrausSet, Povm};

/// Name recorded in report metadata.
pub const RNG_ALGORITHM: &str =
    "ChaCha20 (rand_chacha), substream per object; SplitMix64 seed derivation; Box-Muller normals";

const POVM_RETRIES: u64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed(pub u64);

impl Seed {
    /// Independent child seed for instance `index`.
    pub fn derive(self, index: u64) -> Seed {
        Seed(splitmix64(
            self.0 ^ splitmix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15)),
        ))
    }

    /// Generator for substream `stream` of this seed.
    pub fn rng(self, stream: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    let r = (-2.0 * u1.ln()).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
    let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
    C64::new(r * c, r * s)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Uniform draw from the probability simplex (flat Dirichlet).
pub fn random_probabilities<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// GUE-like Hermitian matrix `(G + G†)/2 · scale`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> ComplexMatrix {
    gaussian_matrix(dim, dim, rng).hermitian_part().scale(scale)
}

/// `G·G†/Tr(G·G†)` with `G` a `total × rank` complex Gaussian matrix.
pub fn random_density(dims: &HilbertDims, rank: usize, seed: Seed) -> Result<DensityMatrix> {
    let n = dims.total();
    if rank == 0 || rank > n {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} outside 1..={n}"
        )));
    }
    let g = gaussian_matrix(n, rank, &mut seed.rng(0));
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    Ok(DensityMatrix::from_trusted(
        w.scale(1.0 / tr),
        dims.clone(),
        false,
    ))
}

/// First `cols` columns of a Haar unitary on `rows` dimensions: Gram–Schmidt
/// (two passes per column) on a complex Gaussian matrix, which fixes the
/// diagonal of `R` to be positive.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(cols <= rows && cols >= 1);
    let g = gaussian_matrix(rows, cols, rng);
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = g.column(j);
        for _ in 0..2 {
            for prev in &q {
                let proj: C64 = prev.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, p) in v.iter_mut().zip(prev) {
                    *x -= proj * p;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        q.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i])
}

pub fn random_unitary(dim: usize, seed: Seed) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "unitary dimension must be >= 1".into(),
        ));
    }
    Ok(random_isometry(dim, dim, &mut seed.rng(0)))
}

/// Kraus set cut from a Haar isometry `ℂ^dim → ℂ^{dim·count}`: operator `α`
/// is rows `α·dim .. (α+1)·dim`. Acts on the leading factors whose dimensions
/// multiply to `dim`; use [`KrausSet::with_acts_on`] to relabel.
pub fn random_kraus(dim: usize, count: usize, seed: Seed) -> Result<KrausSet> {
    if dim == 0 || count == 0 {
        return Err(Error::InvalidArgument(format!(
            "random_kraus needs dim >= 1 and count >= 1 (got {dim}, {count})"
        )));
    }
    let iso = random_isometry(dim * count, dim, &mut seed.rng(0));
    let ops = (0..count)
        .map(|a| ComplexMatrix::from_fn(dim, dim, |i, j| iso[(a * dim + i, j)]))
        .collect();
    KrausSet::new(ops, vec![0])
}

/// `P_i = T^{-1/2} A_i T^{-1/2}` with `A_i = G_iG_i†` and `T = Σ A_i`.
pub fn random_povm(dim: usize, count: usize, seed: Seed) -> Result<Povm> {
    if dim == 0 || count == 0 {
        return Err(Error::InvalidArgument(format!(
            "random_povm needs dim >= 1 and count >= 1 (got {dim}, {count})"
        )));
    }
    if count == 1 {
        return Povm::new(vec![ComplexMatrix::identity(dim)]);
    }
    for attempt in 0..POVM_RETRIES {
        let mut rng = seed.rng(attempt);
        let parts: Vec<ComplexMatrix> = (0..count)
            .map(|_| {
                let g = gaussian_matrix(dim, dim, &mut rng);
                &g * &g.adjoint()
            })
            .collect();
        let total = parts
            .iter()
            .skip(1)
            .fold(parts[0].clone(), |acc, a| &acc + a);
        let Ok(t) = inv_sqrt_pd(&total) else {
            continue;
        };
        let elements: Vec<ComplexMatrix> = parts
            .iter()
            .map(|a| (&(&t * a) * &t).hermitian_part())
            .collect();
        return Povm::new(elements);
    }
    Err(Error::Generation(format!(
        "singular POVM normalization after {POVM_RETRIES} attempts"
    )))
}

/// `Σ_ij p(i,j) |i⟩⟨i| ⊗ |j⟩⟨j| ⊗ σ^{ij}` on three factors; `probs` and
/// `sigmas` are indexed by `i·d₂ + j`.
pub fn cq_state(
    dims: &HilbertDims,
    probs: &[f64],
    sigmas: &[DensityMatrix],
) -> Result<DensityMatrix> {
    if dims.factors() != 3 {
        return Err(Error::InvalidDims(format!(
            "cq state needs 3 factors, got {dims}"
        )));
    }
    let (d1, d2, d3) = (dims.dim(0), dims.dim(1), dims.dim(2));
    if probs.len() != d1 * d2 || sigmas.len() != d1 * d2 {
        return Err(Error::DimensionMismatch(format!(
            "{} weights and {} conditional states for {} classical outcomes",
            probs.len(),
            sigmas.len(),
            d1 * d2
        )));
    }
    if let Some(s) = sigmas.iter().find(|s| s.dim() != d3) {
        return Err(Error::DimensionMismatch(format!(
            "conditional state of dimension {} on a {d3}-dimensional factor",
            s.dim()
        )));
    }
    let mut mat = ComplexMatrix::zeros(dims.total(), dims.total());
    for (ij, (&p, s)) in probs.iter().zip(sigmas).enumerate() {
        for a in 0..d3 {
            for b in 0..d3 {
                mat[(ij * d3 + a, ij * d3 + b)] = s.matrix()[(a, b)] * p;
            }
        }
    }
    DensityMatrix::new(mat, dims.clone())
}

/// Classical weights (substream 0) and conditional states on factor 3
/// (substream `1 + i·d₂ + j`) of a random cq state.
pub fn random_cq_parts(dims: &HilbertDims, seed: Seed) -> Result<(Vec<f64>, Vec<DensityMatrix>)> {
    if dims.factors() != 3 {
        return Err(Error::InvalidDims(format!(
            "cq state needs 3 factors, got {dims}"
        )));
    }
    let classical = dims.dim(0) * dims.dim(1);
    let d3 = HilbertDims::single(dims.dim(2))?;
    let probs = random_probabilities(classical, &mut seed.rng(0));
    let sigmas = (0..classical)
        .map(|k| {
            let mut rng = seed.rng(1 + k as u64);
            let g = gaussian_matrix(d3.total(), d3.total(), &mut rng);
            let w = &g * &g.adjoint();
            let tr = w.trace().re;
            DensityMatrix::from_trusted(w.scale(1.0 / tr), d3.clone(), false)
        })
        .collect();
    Ok((probs, sigmas))
}

pub fn random_cq_state(dims: &HilbertDims, seed: Seed) -> Result<DensityMatrix> {
    let (p, s) = random_cq_parts(dims, seed)?;
    cq_state(dims, &p, &s)
}

/// `U diag(λ) U†` with `λ` uniform in `[min, max]` and Haar `U`.
pub fn random_positive_definite(
    dim: usize,
    min: f64,
    max: f64,
    seed: Seed,
) -> Result<ComplexMatrix> {
    if dim == 0 || !(min > 0.0 && max >= min) {
        return Err(Error::InvalidArgument(format!(
            "bad positive-definite spec dim={dim} range=[{min},{max}]"
        )));
    }
    let u = random_isometry(dim, dim, &mut seed.rng(0));
    let mut rng = seed.rng(1);
    let lam: Vec<f64> = (0..dim)
        .map(|_| min + (max - min) * rng.random::<f64>())
        .collect();
    let d = ComplexMatrix::from_real_diag(&lam);
    Ok((&(&u * &d) * &u.adjoint()).hermitian_part())
}

/// Haar-random pure state of dimension `dim`.
pub fn random_pure_vector(dim: usize, seed: Seed) -> Vec<C64> {
    random_isometry(dim, 1, &mut seed.rng(0)).column(0)
}

/// Product of independent random states, one per factor.
pub fn random_product_density(dims: &HilbertDims, seed: Seed) -> Result<DensityMatrix> {
    let mut mat = ComplexMatrix::identity(1);
    for (k, &d) in dims.as_slice().iter().enumerate() {
        let one = random_density(&HilbertDims::single(d)?, d, seed.derive(k as u64))?;
        mat = kron(&mat, one.matrix());
    }
    Ok(DensityMatrix::from_trusted(mat, dims.clone(), false))
}

/// Minimum eigenvalue helper used by generator contracts.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(m)?.min_value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_is_deterministic_and_distinct() {
        let s = Seed(42);
        assert_eq!(s.derive(3), s.derive(3));
        assert_ne!(s.derive(3), s.derive(4));
        assert_ne!(Seed(1).derive(0), Seed(2).derive(0));
    }

    #[test]
    fn substreams_differ() {
        let a: u64 = Seed(7).rng(0).random();
        let b: u64 = Seed(7).rng(1).random();
        assert_ne!(a, b);
    }

    #[test]
    fn rank_out_of_range() {
        let d = HilbertDims::new(vec![2, 2]).unwrap();
        assert!(random_density(&d, 0, Seed(1)).is_err());
        assert!(random_density(&d, 5, Seed(1)).is_err());
    }

    #[test]
    fn unitary_dim_one_is_phase() {
        let u = random_unitary(1, Seed(3)).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-15);
        assert!(random_unitary(0, Seed(3)).is_err());
    }

    #[test]
    fn povm_single_element_is_identity() {
        let p = random_povm(3, 1, Seed(5)).unwrap();
        assert_eq!(p.elements().len(), 1);
        assert!(p.elements()[0].max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
    }
}
