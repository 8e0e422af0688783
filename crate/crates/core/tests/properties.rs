use proptest::prelude::*;
use qssa_core::checks::{
    check_cqq, check_sandwich, check_ssa, check_stronger_ssa, InequalityReport,
};
use qssa_core::entropy::{mutual_information, relative_entropy, von_neumann};
use qssa_core::linalg::{hermitian_eig, kron, ComplexMatrix, HilbertDims};
use qssa_core::measurement::{check_completeness, povm_to_kraus};
use qssa_core::random::{
    gaussian_matrix, random_density, random_kraus, random_povm, random_unitary, Seed,
};
use qssa_core::wehrl::{make_grid, HusimiField, SpinJ};

fn dims_strategy(factors: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, factors)
}

fn hd(v: &[usize]) -> HilbertDims {
    HilbertDims::new(v.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_trace_composes(dims in dims_strategy(3), seed in any::<u64>()) {
        let d = hd(&dims);
        let rho = random_density(&d, d.total(), Seed(seed)).unwrap();
        let step = rho.partial_trace(&[0, 1]).unwrap().partial_trace(&[0]).unwrap();
        let direct = rho.partial_trace(&[0]).unwrap();
        prop_assert!(step.matrix().max_abs_diff(direct.matrix()) < 1e-13);
        prop_assert!((rho.partial_trace(&[1, 2]).unwrap().trace() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn kron_is_associative(seed in any::<u64>(), r in prop::array::uniform3(1usize..=3)) {
        let mut rng = Seed(seed).rng(0);
        let a = gaussian_matrix(r[0], r[1], &mut rng);
        let b = gaussian_matrix(r[1], r[2], &mut rng);
        let c = gaussian_matrix(r[2], r[0], &mut rng);
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(left.max_abs_diff(&right) < 1e-14);
    }

    #[test]
    fn eigen_decomposition_reconstructs(dim in 1usize..=6, seed in any::<u64>()) {
        let g = gaussian_matrix(dim, dim, &mut Seed(seed).rng(0));
        let h = (&g + &g.adjoint()).scale(0.5);
        let e = hermitian_eig(&h).unwrap();
        let sum: f64 = e.values.iter().sum();
        prop_assert!((sum - h.trace().re).abs() < 1e-12 * (1.0 + h.max_abs()));
        prop_assert!(e.map(|x| x).max_abs_diff(&h) < 1e-12 * (1.0 + h.max_abs()));
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn haar_unitary_is_unitary(dim in 1usize..=6, seed in any::<u64>()) {
        let u = random_unitary(dim, Seed(seed)).unwrap();
        prop_assert!((&u * &u.adjoint()).max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-13);
    }

    #[test]
    fn entropy_is_concave(dim in 2usize..=5, seed in any::<u64>(), lambda in 0.0f64..=1.0) {
        let d = hd(&[dim]);
        let a = random_density(&d, dim, Seed(seed)).unwrap();
        let b = random_density(&d, 1 + (seed as usize) % dim, Seed(seed ^ 1)).unwrap();
        let mix = von_neumann(&a.mix(&b, lambda).unwrap()).nats;
        let avg = lambda * von_neumann(&a).nats + (1.0 - lambda) * von_neumann(&b).nats;
        prop_assert!(mix >= avg - 1e-10);
        prop_assert!(mix <= (dim as f64).ln() + 1e-12);
    }

    #[test]
    fn klein_inequality(dim in 1usize..=5, seed in any::<u64>()) {
        let d = hd(&[dim]);
        let a = random_density(&d, 1 + (seed as usize) % dim, Seed(seed)).unwrap();
        let b = random_density(&d, dim, Seed(seed.wrapping_add(17))).unwrap();
        prop_assert!(relative_entropy(&a, &b).unwrap().nats >= -1e-12);
        prop_assert!(relative_entropy(&a, &a).unwrap().nats.abs() < 1e-10);
    }

    #[test]
    fn subadditivity_and_araki_lieb(dims in dims_strategy(2), seed in any::<u64>()) {
        let d = hd(&dims);
        let rho = random_density(&d, 1 + (seed as usize) % d.total(), Seed(seed)).unwrap();
        let s12 = von_neumann(&rho).nats;
        let s1 = von_neumann(&rho.partial_trace(&[0]).unwrap()).nats;
        let s2 = von_neumann(&rho.partial_trace(&[1]).unwrap()).nats;
        prop_assert!(s12 <= s1 + s2 + 1e-10);
        prop_assert!((s1 - s2).abs() <= s12 + 1e-10);
        prop_assert!((mutual_information(&rho).unwrap().nats - (s1 + s2 - s12)).abs() < 1e-12);
    }

    #[test]
    fn kraus_and_povm_generators_are_complete(dim in 1usize..=4, count in 1usize..=4, seed in any::<u64>()) {
        prop_assert!(check_completeness(&random_kraus(dim, count, Seed(seed)).unwrap()) < 1e-12);
        let p = random_povm(dim, count, Seed(seed)).unwrap();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for e in p.elements() {
            sum = &sum + e;
            prop_assert!(hermitian_eig(e).unwrap().min_value() >= -1e-12);
        }
        prop_assert!(sum.max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-12);
    }

    #[test]
    fn stronger_ssa_is_scale_free(seed in any::<u64>(), count in 1usize..=4) {
        let d = hd(&[2, 2, 2]);
        let rho = random_density(&d, 8, Seed(seed)).unwrap();
        let k = random_kraus(2, count, Seed(seed ^ 0xabc)).unwrap();
        let base = check_stronger_ssa(&rho, &k).unwrap();
        prop_assert!(base.pass);
        for c in [0.5, 2.0] {
            let scaled = check_stronger_ssa(&rho.scaled(c).unwrap(), &k).unwrap();
            prop_assert_eq!(scaled.pass, base.pass);
            prop_assert!((scaled.slack - c * base.slack).abs() <= 1e-8 * c);
        }
    }

    #[test]
    fn sandwich_chain_matches_ssa(seed in any::<u64>(), count in 1usize..=4) {
        let d = hd(&[2, 3, 2]);
        let rho = random_density(&d, 12, Seed(seed)).unwrap();
        let k = random_kraus(2, count, Seed(seed ^ 5)).unwrap();
        let (l, r) = check_sandwich(&rho, &k).unwrap();
        let ssa = check_ssa(&rho).unwrap();
        prop_assert!((l.lhs - ssa.lhs).abs() <= 1e-12);
        prop_assert!((r.rhs - ssa.rhs).abs() <= 1e-12);
        prop_assert!(l.pass && r.pass);
    }

    #[test]
    fn cqq_equals_stronger_ssa_with_sqrt_kraus(seed in any::<u64>(), count in 1usize..=4) {
        let d = hd(&[2, 2, 2]);
        let rho = random_density(&d, 8, Seed(seed)).unwrap();
        let p = random_povm(2, count, Seed(seed ^ 9)).unwrap();
        let a = check_cqq(&rho, &p).unwrap();
        let b = check_stronger_ssa(&rho, &povm_to_kraus(&p).unwrap()).unwrap();
        prop_assert!((a.slack - b.slack).abs() <= 1e-10);
    }

    #[test]
    fn husimi_mass_is_trace(two_j in 0u32..=6, seed in any::<u64>()) {
        let spin = SpinJ(two_j);
        let d = hd(&[spin.dim()]);
        let rho = random_density(&d, spin.dim(), Seed(seed)).unwrap();
        let h = HusimiField::compute(&rho, &[&make_grid(spin)]).unwrap();
        prop_assert!((h.mass() - 1.0).abs() < 1e-10);
        prop_assert!(h.min_value() >= -1e-12);
    }

    #[test]
    fn pass_is_recomputable(lhs in -10.0f64..10.0, gap in -1e-6f64..1e-6) {
        let r = InequalityReport::le("x", lhs, lhs + gap, &[2]);
        prop_assert_eq!(r.pass, r.recompute_pass());
        prop_assert_eq!(r.pass, r.rhs - r.lhs >= -r.tol);
        let json = serde_json::to_string(&r).unwrap();
        let back: InequalityReport = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.pass, back.recompute_pass());
    }
}
