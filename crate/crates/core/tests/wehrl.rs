use std::f64::consts::PI;

use qssa_core::linalg::{ComplexMatrix, DensityMatrix, HilbertDims, C64};
use qssa_core::random::{random_density, Seed};
use qssa_core::wehrl::{
    bloch_state, check_wehrl_convexity, check_wehrl_mutual_info, make_grid, wehrl_entropy,
    wehrl_entropy_single, BlochGrid, SpinJ,
};
use rand::Rng;

fn coherent(spin: SpinJ, theta: f64, phi: f64) -> DensityMatrix {
    let v = bloch_state(spin, theta, phi).unwrap();
    DensityMatrix::pure(&v, HilbertDims::single(spin.dim()).unwrap()).unwrap()
}

/// Independent oracle: `−∫ h ln h` with `h = cos^{4j}(θ/2)` about the north
/// pole reduces to `2j/(2j+1)` by the substitution `u = cos²(θ/2)`; here it is
/// integrated with a fine midpoint rule instead.
fn coherent_wehrl_oracle(two_j: u32) -> f64 {
    let n = 200_000;
    let d = f64::from(two_j + 1);
    let mut acc = 0.0;
    for i in 0..n {
        let x = -1.0 + (i as f64 + 0.5) * 2.0 / n as f64;
        let u: f64 = (1.0 + x) / 2.0;
        let h = u.powi(two_j as i32);
        if h > 0.0 {
            acc -= h * h.ln();
        }
    }
    acc * (2.0 / n as f64) * 2.0 * PI * d / (4.0 * PI)
}

#[test]
fn oracle_matches_closed_form() {
    for two_j in 1..=10u32 {
        let closed = f64::from(two_j) / f64::from(two_j + 1);
        assert!(
            (coherent_wehrl_oracle(two_j) - closed).abs() < 1e-8,
            "two_j = {two_j}"
        );
    }
}

#[test]
fn coherent_states_hit_analytic_value() {
    for two_j in 1..=10u32 {
        let spin = SpinJ(two_j);
        for (t, p) in [(0.0, 0.0), (0.7, 1.3), (2.9, 4.0)] {
            let sw = wehrl_entropy_single(&coherent(spin, t, p)).unwrap().nats;
            assert!(
                (sw - spin.coherent_wehrl()).abs() < 1e-6,
                "two_j = {two_j}, θ = {t}: {sw}"
            );
        }
    }
}

#[test]
fn residual_up_to_spin_ten() {
    for two_j in 0..=20u32 {
        let r = make_grid(SpinJ(two_j)).resolution_residual();
        assert!(r <= 1e-12, "two_j = {two_j}: {r}");
    }
}

#[test]
fn overlap_law() {
    let mut rng = Seed(77).rng(0);
    for _ in 0..20 {
        let two_j = rng.random_range(1..8u32);
        let spin = SpinJ(two_j);
        let (t1, p1) = (rng.random::<f64>() * PI, rng.random::<f64>() * 2.0 * PI);
        let (t2, p2) = (rng.random::<f64>() * PI, rng.random::<f64>() * 2.0 * PI);
        let a = bloch_state(spin, t1, p1).unwrap();
        let b = bloch_state(spin, t2, p2).unwrap();
        let ov: C64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
        let cos_g = t1.cos() * t2.cos() + t1.sin() * t2.sin() * (p1 - p2).cos();
        let expected = ((1.0 + cos_g) / 2.0).powi(two_j as i32);
        assert!((ov.norm_sqr() - expected).abs() < 1e-12);
    }
}

#[test]
fn refinement_changes_little() {
    for two_j in 1..=10u32 {
        let spin = SpinJ(two_j);
        let rho = random_density(
            &HilbertDims::single(spin.dim()).unwrap(),
            1,
            Seed(u64::from(two_j)),
        )
        .unwrap();
        let g = BlochGrid::converged(spin);
        let a = wehrl_entropy(&rho, &[&g]).unwrap().nats;
        let b = wehrl_entropy(&rho, &[&g.refined()]).unwrap().nats;
        assert!((a - b).abs() <= 1e-6, "two_j = {two_j}: {}", (a - b).abs());
    }
}

#[test]
fn z_rotation_invariance() {
    let spin = SpinJ(4);
    let dims = HilbertDims::single(5).unwrap();
    let rho = random_density(&dims, 3, Seed(5)).unwrap();
    let angle = 0.37;
    let diag: Vec<C64> = (0..5)
        .map(|k| C64::from_polar(1.0, -(k as f64) * angle))
        .collect();
    let u = ComplexMatrix::from_fn(
        5,
        5,
        |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) },
    );
    let rotated = rho.conjugate(&u).unwrap();
    let g = BlochGrid::converged(spin);
    let a = wehrl_entropy(&rho, &[&g]).unwrap().nats;
    let b = wehrl_entropy(&rotated, &[&g]).unwrap().nats;
    assert!((a - b).abs() <= 2e-6);
}

#[test]
fn seeded_pairs_pass() {
    for t in 0..10u64 {
        let rho = random_density(&HilbertDims::new(vec![2, 2]).unwrap(), 4, Seed(t)).unwrap();
        assert!(check_wehrl_mutual_info(&rho).unwrap().pass);
        let dims = HilbertDims::single(3).unwrap();
        let a = random_density(&dims, 3, Seed(100 + t)).unwrap();
        let b = random_density(&dims, 2, Seed(200 + t)).unwrap();
        let r = check_wehrl_convexity(&a, &b, &[0.5]).unwrap();
        assert!(r.slack >= -1e-8);
        assert!(check_wehrl_convexity(&a, &a, &[0.5]).unwrap().slack.abs() < 1e-12);
        assert!(
            check_wehrl_convexity(&a, &b, &[0.0, 1.0])
                .unwrap()
                .slack
                .abs()
                < 1e-12
        );
    }
}

#[test]
fn product_state_mutual_info_holds() {
    let a = random_density(&HilbertDims::single(2).unwrap(), 2, Seed(1)).unwrap();
    let b = random_density(&HilbertDims::single(3).unwrap(), 3, Seed(2)).unwrap();
    let r = check_wehrl_mutual_info(&a.tensor(&b)).unwrap();
    assert!(r.slack >= -1e-8);
}
