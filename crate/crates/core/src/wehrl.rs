//! SU(2) Bloch coherent states, product quadrature on the sphere, Husimi
//! functions and Wehrl entropy.
//!
//! The grid takes Gauss–Legendre nodes in `cos θ` and uniform nodes in `φ`,
//! with weights `(2j+1)/(4π) · w_i · 2π/N_φ`. Every matrix element of
//! `|Ω⟩⟨Ω|` is a polynomial of degree `2j` in `cos θ` times a trigonometric
//! polynomial of degree `2j` in `φ`, so the grid resolves the identity
//! exactly once `N_θ ≥ 2j+1` and `N_φ ≥ 2·(2j)+2`. The weighted projectors
//! then form a rank-one POVM, which makes the discrete Wehrl entropy obey
//! the same inequalities as the continuum one.

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::checks::{worst_lambda, InequalityReport};
use crate::entropy::{von_neumann, EntropyValue, PROB_FLOOR};
use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::linalg::{ComplexMatrix, DensityMatrix, HilbertDims, C64, ZERO};
use crate::random::{random_pure_vector, Seed};

/// Nodes per axis of [`BlochGrid::converged`] unless the exact minimum is larger.
pub const CONVERGED_THETA: usize = 64;
pub const CONVERGED_PHI: usize = 128;

/// Spin `j = two_j / 2`, Hilbert dimension `two_j + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinJ(pub u32);

impl SpinJ {
    pub fn two_j(self) -> u32 {
        self.0
    }

    pub fn j(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// Spin whose representation has dimension `dim`.
    pub fn from_dim(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDims(
                "spin dimension must be at least 1".into(),
            ));
        }
        Ok(SpinJ((dim - 1) as u32))
    }

    /// `2j/(2j+1)`, the Wehrl entropy of every coherent state.
    pub fn coherent_wehrl(self) -> f64 {
        f64::from(self.0) / f64::from(self.0 + 1)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// `|θ,φ⟩` in the basis `|j,j⟩, |j,j−1⟩, …, |j,−j⟩`: the entry at index
/// `k = j − m` is `√C(2j,k) cos^{2j−k}(θ/2) sin^k(θ/2) e^{−ikφ}`.
pub fn bloch_state(spin: SpinJ, theta: f64, phi: f64) -> Result<Vec<C64>> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "theta = {theta} outside [0, π]"
        )));
    }
    let n = spin.two_j();
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    Ok((0..=n)
        .map(|k| {
            let amp = binomial(n, k).sqrt() * c.powi((n - k) as i32) * s.powi(k as i32);
            C64::from_polar(amp, -(f64::from(k)) * phi)
        })
        .collect())
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence, `n ≥ 1`.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Product quadrature grid on the sphere carrying the coherent state at
/// every node.
#[derive(Clone, Debug)]
pub struct BlochGrid {
    spin: SpinJ,
    n_theta: usize,
    n_phi: usize,
    nodes: Vec<(f64, f64)>,
    weights: Vec<f64>,
    states: Vec<Vec<C64>>,
}

impl BlochGrid {
    /// Smallest sizes for which the grid resolves the identity exactly.
    pub fn min_resolution(spin: SpinJ) -> (usize, usize) {
        let n = spin.two_j() as usize;
        (n + 1, 2 * n + 2)
    }

    pub fn with_resolution(spin: SpinJ, n_theta: usize, n_phi: usize) -> Result<Self> {
        let (mt, mp) = Self::min_resolution(spin);
        if n_theta < mt || n_phi < mp {
            return Err(Error::InvalidArgument(format!(
                "grid {n_theta}x{n_phi} too coarse for two_j = {}; need at least {mt}x{mp}",
                spin.two_j()
            )));
        }
        let (xs, ws) = gauss_legendre(n_theta);
        let scale = spin.dim() as f64 / (4.0 * PI) * (2.0 * PI / n_phi as f64);
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        let mut states = Vec::with_capacity(n_theta * n_phi);
        for (x, w) in xs.iter().zip(&ws) {
            let theta = x.clamp(-1.0, 1.0).acos();
            for b in 0..n_phi {
                let phi = 2.0 * PI * b as f64 / n_phi as f64;
                nodes.push((theta, phi));
                weights.push(w * scale);
                states.push(bloch_state(spin, theta, phi)?);
            }
        }
        Ok(Self {
            spin,
            n_theta,
            n_phi,
            nodes,
            weights,
            states,
        })
    }

    /// Default grid: `N_θ = 2j + 4`, `N_φ = 2·(2j) + 4`.
    pub fn new(spin: SpinJ) -> Self {
        let n = spin.two_j() as usize;
        Self::with_resolution(spin, n + 4, 2 * n + 4).expect("default grid is above the minimum")
    }

    /// Grid fine enough that `−∫ h ln h` is accurate to about `1e-8` for a
    /// single spin.
    pub fn converged(spin: SpinJ) -> Self {
        let n = spin.two_j() as usize;
        Self::with_resolution(
            spin,
            (n + 4).max(CONVERGED_THETA),
            (2 * n + 4).max(CONVERGED_PHI),
        )
        .expect("converged grid is above the minimum")
    }

    /// Same spin with both axes doubled.
    pub fn refined(&self) -> Self {
        Self::with_resolution(self.spin, 2 * self.n_theta, 2 * self.n_phi)
            .expect("refinement keeps the grid above the minimum")
    }

    pub fn spin(&self) -> SpinJ {
        self.spin
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.n_theta, self.n_phi)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[Vec<C64>] {
        &self.states
    }

    /// `Σ_i w_i |Ω_i⟩⟨Ω_i|`.
    pub fn frame_operator(&self) -> ComplexMatrix {
        let d = self.spin.dim();
        let mut acc = ComplexMatrix::zeros(d, d);
        for (w, v) in self.weights.iter().zip(&self.states) {
            for a in 0..d {
                for b in 0..d {
                    acc[(a, b)] += v[a] * v[b].conj() * *w;
                }
            }
        }
        acc
    }

    /// Largest entry of `Σ_i w_i |Ω_i⟩⟨Ω_i| − I`.
    pub fn resolution_residual(&self) -> f64 {
        self.frame_operator()
            .max_abs_diff(&ComplexMatrix::identity(self.spin.dim()))
    }
}

/// The spec-default grid for `spin`.
pub fn make_grid(spin: SpinJ) -> BlochGrid {
    BlochGrid::new(spin)
}

/// Husimi function `h = ⟨Ω|ρ|Ω⟩` on one grid, or `⟨Ω₁Ω₂|ρ|Ω₁Ω₂⟩` on the
/// product of two grids (first grid index slowest).
#[derive(Clone, Debug)]
pub struct HusimiField {
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
    /// Node angles; one pair per factor.
    pub nodes: Vec<Vec<(f64, f64)>>,
}

fn check_grids(rho: &DensityMatrix, grids: &[&BlochGrid]) -> Result<()> {
    let dims = rho.dims().as_slice();
    if grids.is_empty() || grids.len() > 2 || grids.len() != dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} grids for a state with dims {}",
            grids.len(),
            rho.dims()
        )));
    }
    for (g, &d) in grids.iter().zip(dims) {
        if g.spin().dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "grid for two_j = {} on a factor of dimension {d}",
                g.spin().two_j()
            )));
        }
    }
    Ok(())
}

impl HusimiField {
    pub fn compute(rho: &DensityMatrix, grids: &[&BlochGrid]) -> Result<Self> {
        check_grids(rho, grids)?;
        let m = rho.matrix();
        if grids.len() == 1 {
            let g = grids[0];
            let values = g.states().iter().map(|v| m.expectation(v).re).collect();
            return Ok(Self {
                weights: g.weights().to_vec(),
                values,
                nodes: g.nodes().iter().map(|&n| vec![n]).collect(),
            });
        }
        let (g1, g2) = (grids[0], grids[1]);
        let (d1, d2) = (g1.spin().dim(), g2.spin().dim());
        let n2 = g2.len();
        let mut weights = Vec::with_capacity(g1.len() * n2);
        let mut values = Vec::with_capacity(g1.len() * n2);
        let mut nodes = Vec::with_capacity(g1.len() * n2);
        for (i, u) in g1.states().iter().enumerate() {
            // Block of ρ conditioned on ⟨u| ⊗ I from the left and |u⟩ ⊗ I from the right.
            let mut block = ComplexMatrix::zeros(d2, d2);
            for a in 0..d1 {
                for b in 0..d1 {
                    let c = u[a].conj() * u[b];
                    if c == ZERO {
                        continue;
                    }
                    for x in 0..d2 {
                        for y in 0..d2 {
                            block[(x, y)] += c * m[(a * d2 + x, b * d2 + y)];
                        }
                    }
                }
            }
            for (k, v) in g2.states().iter().enumerate() {
                weights.push(g1.weights()[i] * g2.weights()[k]);
                values.push(block.expectation(v).re);
                nodes.push(vec![g1.nodes()[i], g2.nodes()[k]]);
            }
        }
        Ok(Self {
            weights,
            values,
            nodes,
        })
    }

    /// `Σ w h`, equal to `Tr ρ` on an exact grid.
    pub fn mass(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.values)
            .map(|(w, h)| w * h)
            .sum()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `−Σ w h ln h`, dropping `h < 1e-15`.
    pub fn entropy(&self) -> f64 {
        -self
            .weights
            .iter()
            .zip(&self.values)
            .filter(|(_, &h)| h >= PROB_FLOOR)
            .map(|(w, &h)| w * h * h.ln())
            .sum::<f64>()
            + 0.0
    }

    /// One CSV row per node: angles of each factor, weight, value.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let factors = self.nodes.first().map_or(1, Vec::len);
        let mut header = Vec::new();
        for f in 1..=factors {
            header.push(format!("theta{f}"));
            header.push(format!("phi{f}"));
        }
        header.push("weight".into());
        header.push("husimi".into());
        writeln!(out, "{}", header.join(","))?;
        for ((node, w), h) in self.nodes.iter().zip(&self.weights).zip(&self.values) {
            for (t, p) in node {
                write!(out, "{t:?},{p:?},")?;
            }
            writeln!(out, "{w:?},{h:?}")?;
        }
        Ok(())
    }
}

/// Wehrl entropy of a one- or two-factor spin state on the given grids.
pub fn wehrl_entropy(rho: &DensityMatrix, grids: &[&BlochGrid]) -> Result<EntropyValue> {
    Ok(EntropyValue::finite(
        HusimiField::compute(rho, grids)?.entropy(),
    ))
}

/// Wehrl entropy of a single spin on [`BlochGrid::converged`].
pub fn wehrl_entropy_single(rho: &DensityMatrix) -> Result<EntropyValue> {
    if rho.dims().factors() != 1 {
        return Err(Error::InvalidDims(format!(
            "expected one spin factor, got dims {}",
            rho.dims()
        )));
    }
    let grid = BlochGrid::converged(SpinJ::from_dim(rho.dim())?);
    wehrl_entropy(rho, &[&grid])
}

/// `S^W[ρ₁] + S^W[ρ₂] − S^W[ρ₁₂] ≤ S[ρ₁] + S[ρ₂] − S[ρ₁₂]`, all three Wehrl
/// entropies on the default grids so that the grid weights cancel.
pub fn check_wehrl_mutual_info(rho12: &DensityMatrix) -> Result<InequalityReport> {
    let dims = rho12.dims().as_slice();
    if dims.len() != 2 {
        return Err(Error::InvalidDims(format!(
            "expected two spin factors, got dims {}",
            rho12.dims()
        )));
    }
    let g1 = BlochGrid::new(SpinJ::from_dim(dims[0])?);
    let g2 = BlochGrid::new(SpinJ::from_dim(dims[1])?);
    let rho1 = rho12.partial_trace(&[0])?;
    let rho2 = rho12.partial_trace(&[1])?;
    let joint = HusimiField::compute(rho12, &[&g1, &g2])?;
    let w_mi =
        wehrl_entropy(&rho1, &[&g1])?.nats + wehrl_entropy(&rho2, &[&g2])?.nats - joint.entropy();
    let q_mi = von_neumann(&rho1).nats + von_neumann(&rho2).nats - von_neumann(rho12).nats;
    Ok(InequalityReport::le("wehrl-mutual-info", w_mi, q_mi, dims)
        .with_meta("husimi_mass", joint.mass()))
}

fn wehrl_minus_von_neumann(rho: &DensityMatrix, grid: &BlochGrid) -> Result<f64> {
    Ok(wehrl_entropy(rho, &[grid])?.nats - von_neumann(rho).nats)
}

/// Convexity of `S^W − S` on a single spin, at the weight with the smallest slack.
pub fn check_wehrl_convexity(
    a: &DensityMatrix,
    b: &DensityMatrix,
    lambdas: &[f64],
) -> Result<InequalityReport> {
    if a.dims() != b.dims() || a.dims().factors() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "convexity needs two states of the same spin, got dims {} and {}",
            a.dims(),
            b.dims()
        )));
    }
    let grid = BlochGrid::converged(SpinJ::from_dim(a.dim())?);
    let ga = wehrl_minus_von_neumann(a, &grid)?;
    let gb = wehrl_minus_von_neumann(b, &grid)?;
    let (lambda, lhs, rhs) = worst_lambda(lambdas, |l| {
        Ok((
            wehrl_minus_von_neumann(&a.mix(b, l)?, &grid)?,
            l * ga + (1.0 - l) * gb,
        ))
    })?;
    Ok(
        InequalityReport::le("wehrl-convexity", lhs, rhs, a.dims().as_slice())
            .with_meta("lambda", lambda),
    )
}

/// `S^W ≥ S` for a one- or two-factor spin state; single spins use the
/// converged grid, pairs the product of default grids.
pub fn check_wehrl_bound(rho: &DensityMatrix) -> Result<InequalityReport> {
    let dims = rho.dims().as_slice();
    let sw = match dims.len() {
        1 => wehrl_entropy_single(rho)?.nats,
        2 => {
            let g1 = BlochGrid::new(SpinJ::from_dim(dims[0])?);
            let g2 = BlochGrid::new(SpinJ::from_dim(dims[1])?);
            wehrl_entropy(rho, &[&g1, &g2])?.nats
        }
        _ => {
            return Err(Error::InvalidDims(format!(
                "expected one or two spin factors, got dims {}",
                rho.dims()
            )))
        }
    };
    Ok(InequalityReport::le(
        "wehrl-bound",
        von_neumann(rho).nats,
        sw,
        dims,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub trial: usize,
    pub seed: u64,
    pub two_j: u32,
    pub s_w: f64,
    pub s: f64,
    pub diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WehrlScan {
    pub rows: Vec<ScanRow>,
    pub min_s_w: f64,
    pub argmin_trial: usize,
    pub coherent_value: f64,
    /// `min_s_w − coherent_value`.
    pub margin: f64,
    pub resolution_residual: f64,
    /// Whether `min_s_w ≥ coherent_value − 1e-6`. Informational only.
    pub above_coherent: bool,
}

/// Tolerance used for [`WehrlScan::above_coherent`].
pub const SCAN_TOL: f64 = 1e-6;

/// Wehrl entropy of `trials` Haar-random pure states; trial `t` uses
/// `seed.derive(t)`.
pub fn wehrl_min_scan(
    spin: SpinJ,
    trials: usize,
    seed: Seed,
    exec: Execution,
) -> Result<WehrlScan> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "scan needs at least one trial".into(),
        ));
    }
    let grid = BlochGrid::converged(spin);
    let dims = HilbertDims::single(spin.dim())?;
    let rows = map_range(exec, trials, |t| -> Result<ScanRow> {
        let s = seed.derive(t as u64);
        let rho = DensityMatrix::pure(&random_pure_vector(spin.dim(), s), dims.clone())?;
        let sw = wehrl_entropy(&rho, &[&grid])?.nats;
        let sv = von_neumann(&rho).nats;
        Ok(ScanRow {
            trial: t,
            seed: s.0,
            two_j: spin.two_j(),
            s_w: sw,
            s: sv,
            diff: sw - sv,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (argmin_trial, min_s_w) =
        rows.iter()
            .map(|r| (r.trial, r.s_w))
            .fold(
                (0, f64::INFINITY),
                |acc, x| if x.1 < acc.1 { x } else { acc },
            );
    let coherent_value = spin.coherent_wehrl();
    Ok(WehrlScan {
        min_s_w,
        argmin_trial,
        coherent_value,
        margin: min_s_w - coherent_value,
        resolution_residual: grid.resolution_residual(),
        above_coherent: min_s_w >= coherent_value - SCAN_TOL,
        rows,
    })
}

impl WehrlScan {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "trial,seed,two_j,S_W,S,diff")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{:?},{:?},{:?}",
                r.trial, r.seed, r.two_j, r.s_w, r.s, r.diff
            )?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        format!(
            "min S_W = {:?} (trial {}), coherent 2j/(2j+1) = {:?}, margin = {:?}, resolution residual = {:e}",
            self.min_s_w, self.argmin_trial, self.coherent_value, self.margin, self.resolution_residual
        )
    }
}
