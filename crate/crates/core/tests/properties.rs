use proptest::prelude::*;

use wom_core::ensembles::{
    ginibre, haar_pure, haar_unitary, hs_mixed, random_product_pure, RngStream,
};
use wom_core::linalg::{
    hermitian_eig, kron, partial_trace, partial_transpose, BipartiteDims, ComplexMatrix, Subsystem,
};
use wom_core::measurement::{sic_pom_from_fiducial, wom_from_rank_one, Fiducial};
use wom_core::states::{
    is_separable_2x2, negativity, pure_concurrence, purity, schmidt, wootters_concurrence,
    DensityOperator, PureState,
};
use wom_core::tomography::{reconstruct, DualFrame};

fn dims_strategy() -> impl Strategy<Value = BipartiteDims> {
    prop_oneof![
        Just((2, 2)),
        Just((2, 3)),
        Just((2, 4)),
        Just((3, 3)),
        Just((3, 4)),
    ]
    .prop_map(|(a, b)| BipartiteDims::new(a, b).unwrap())
}

fn hermitian(d: usize, rng: &mut RngStream) -> ComplexMatrix {
    ginibre(d, rng).hermitian_part()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_transpose_is_an_involution(seed: u64, dims in dims_strategy()) {
        let m = ginibre(dims.d(), &mut RngStream::new(seed, 0));
        let once = partial_transpose(&m, dims).unwrap();
        let twice = partial_transpose(&once, dims).unwrap();
        prop_assert!(twice.max_abs_diff(&m) < 1e-15);
        prop_assert!((once.trace() - m.trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_transpose_of_product_transposes_second_factor(seed: u64, dims in dims_strategy()) {
        let mut rng = RngStream::new(seed, 0);
        let a = ginibre(dims.d1(), &mut rng);
        let b = ginibre(dims.d2(), &mut rng);
        let pt = partial_transpose(&kron(&a, &b), dims).unwrap();
        prop_assert!(pt.max_abs_diff(&kron(&a, &b.transpose())) < 1e-12);
    }

    #[test]
    fn kron_trace_and_partial_trace(seed: u64, dims in dims_strategy()) {
        let mut rng = RngStream::new(seed, 0);
        let a = ginibre(dims.d1(), &mut rng);
        let b = ginibre(dims.d2(), &mut rng);
        let ab = kron(&a, &b);
        prop_assert!((ab.trace() - a.trace() * b.trace()).norm() < 1e-10);
        let ra = partial_trace(&ab, dims, Subsystem::First).unwrap();
        prop_assert!(ra.max_abs_diff(&a.scale_complex(b.trace())) < 1e-10);
        let rb = partial_trace(&ab, dims, Subsystem::Second).unwrap();
        prop_assert!(rb.max_abs_diff(&b.scale_complex(a.trace())) < 1e-10);
    }

    #[test]
    fn eigendecomposition_reconstructs(seed: u64, d in 1usize..9) {
        let h = hermitian(d, &mut RngStream::new(seed, 0));
        let e = hermitian_eig(&h).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(&h) < 1e-10);
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let v = &e.eigenvectors;
        prop_assert!(v.adjoint().matmul(v).max_abs_diff(&ComplexMatrix::identity(d)) < 1e-10);
    }

    #[test]
    fn wootters_agrees_with_pure_concurrence(seed: u64) {
        let psi = haar_pure(BipartiteDims::two_qubits(), &mut RngStream::new(seed, 0));
        let q = pure_concurrence(&psi).unwrap();
        let w = wootters_concurrence(&psi.density()).unwrap();
        prop_assert!((q - w).abs() < 1e-7, "{q} vs {w}");
    }

    #[test]
    fn negativity_marks_exactly_the_npt_states(seed: u64) {
        let rho = hs_mixed(BipartiteDims::two_qubits(), &mut RngStream::new(seed, 0));
        let n = negativity(&rho);
        let sep = is_separable_2x2(&rho).unwrap();
        let c = wootters_concurrence(&rho).unwrap();
        prop_assert!(n >= -1e-12);
        prop_assert_eq!(sep, n <= 1e-9);
        prop_assert_eq!(sep, c <= 1e-7);
    }

    #[test]
    fn local_unitaries_preserve_entanglement(seed: u64, dims in dims_strategy()) {
        let mut rng = RngStream::new(seed, 0);
        let psi = haar_pure(dims, &mut rng);
        let u1 = haar_unitary(dims.d1(), &mut rng);
        let u2 = haar_unitary(dims.d2(), &mut rng);
        let phi = psi.local_transformed(&u1, &u2).unwrap();
        let a = schmidt(&psi).weights();
        let b = schmidt(&phi).weights();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        if dims.is_two_qubit() {
            let (x, y) = (pure_concurrence(&psi).unwrap(), pure_concurrence(&phi).unwrap());
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn schmidt_form_reconstructs(seed: u64, dims in dims_strategy()) {
        let psi = haar_pure(dims, &mut RngStream::new(seed, 0));
        let s = schmidt(&psi);
        let back = s.reconstruct();
        let diff = back
            .iter()
            .zip(psi.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        prop_assert!(diff < 1e-10);
        prop_assert!((s.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_states_are_separable(seed: u64, dims in dims_strategy()) {
        let psi = random_product_pure(dims, &mut RngStream::new(seed, 0));
        prop_assert!(!psi.is_entangled());
        prop_assert!((schmidt(&psi).lambda1() - 1.0).abs() < 1e-10);
        let pt = psi.density().partial_transpose();
        prop_assert!(hermitian_eig(&pt).unwrap().min() > -1e-10);
    }

    #[test]
    fn mixed_samples_are_valid_states(seed: u64, dims in dims_strategy()) {
        let rho = hs_mixed(dims, &mut RngStream::new(seed, 0));
        let checked = DensityOperator::new(dims, rho.matrix().clone());
        prop_assert!(checked.is_ok());
        let p = purity(&rho);
        prop_assert!(p >= 1.0 / dims.d() as f64 - 1e-12 && p <= 1.0 + 1e-12);
    }

    #[test]
    fn dual_frames_reproduce_any_operator(seed: u64, use_wom: bool) {
        let sic = sic_pom_from_fiducial(&Fiducial::shipped_d4());
        let wom = wom_from_rank_one(&sic).unwrap();
        let pom = if use_wom { wom.as_pom() } else { &sic };
        let dual = DualFrame::new(pom).unwrap();
        let a = hermitian(4, &mut RngStream::new(seed, 0));
        prop_assert!(dual.expand(pom, &a).max_abs_diff(&a) < 1e-7);
        for r in dual.duals() {
            prop_assert!((r.trace().re - 1.0).abs() < 1e-8);
            prop_assert!(r.is_hermitian(1e-12));
        }
    }

    #[test]
    fn reconstruction_from_exact_frequencies(seed: u64) {
        let sic = sic_pom_from_fiducial(&Fiducial::shipped_d4());
        let dual = DualFrame::new(&sic).unwrap();
        let rho = hs_mixed(BipartiteDims::two_qubits(), &mut RngStream::new(seed, 0));
        // Large integer counts proportional to the Born probabilities.
        let scale = 1u64 << 40;
        let counts: Vec<u64> = sic
            .probabilities(rho.matrix())
            .iter()
            .map(|p| (p * scale as f64).round() as u64)
            .collect();
        let est = reconstruct(&counts, &dual).unwrap();
        prop_assert!(est.max_abs_diff(rho.matrix()) < 1e-8);
        prop_assert!((est.trace().re - 1.0).abs() < 1e-12);
    }
}

#[test]
fn single_count_reconstructs_its_dual() {
    let sic = sic_pom_from_fiducial(&Fiducial::shipped_d4());
    let dual = DualFrame::new(&sic).unwrap();
    for i in 0..16 {
        let mut counts = vec![0u64; 16];
        counts[i] = 1;
        let est = reconstruct(&counts, &dual).unwrap();
        assert!(est.max_abs_diff(&dual.duals()[i]) < 1e-15);
    }
}

#[test]
fn pure_state_validation() {
    let dims = BipartiteDims::two_qubits();
    let psi = PureState::maximally_entangled(dims);
    assert!(PureState::new(dims, psi.amplitudes().to_vec()).is_ok());
    let mut bad = psi.amplitudes().to_vec();
    bad[0] *= 2.0;
    assert!(PureState::new(dims, bad).is_err());
}
