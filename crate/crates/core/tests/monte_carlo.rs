//! Seeded Monte Carlo checks against closed forms and sampling laws.

use std::f64::consts::PI;

use wom_core::ensembles::{haar_pure, haar_unitary, hs_mixed, hs_mixed_matrix, RngStream};
use wom_core::experiments::{
    detection_ratio_experiment, mixed_detection_vs_purity, sampled_moments, Detector,
    ExperimentConfig, StateClass,
};
use wom_core::linalg::{hermitian_eig, BipartiteDims, ComplexMatrix};
use wom_core::measurement::{sic_pom_from_fiducial, wom_detects, wom_from_rank_one, Fiducial, Pom};
use wom_core::states::{pure_concurrence, DensityOperator, PureState};
use wom_core::stats::{binomial_stderr, Moments};
use wom_core::tomography::{
    mse_experiment, reconstruct, simulate_counts, DualFrame, MseJob, MseModel,
};
use wom_core::witness::{detects, pt_witness};

const SEED: u64 = 0xC0FFEE;

fn two_qubits() -> BipartiteDims {
    BipartiteDims::two_qubits()
}

fn sic() -> Pom {
    sic_pom_from_fiducial(&Fiducial::shipped_d4())
}

#[test]
fn linear_inversion_is_unbiased() {
    let pom = sic();
    let dual = DualFrame::new(&pom).unwrap();
    let rho = hs_mixed_matrix(4, &mut RngStream::new(SEED, 1 << 40));
    let runs = 10_000;
    let mut re = vec![Moments::new(); 16];
    let mut im = vec![Moments::new(); 16];
    for t in 0..runs {
        let counts = simulate_counts(&pom, &rho, 100, &mut RngStream::new(SEED, t)).unwrap();
        let est = reconstruct(&counts, &dual).unwrap();
        for (k, z) in est.as_slice().iter().enumerate() {
            re[k].push(z.re);
            im[k].push(z.im);
        }
    }
    for (k, z) in rho.as_slice().iter().enumerate() {
        for (m, x) in [(&re[k], z.re), (&im[k], z.im)] {
            let se = m.mean_stderr();
            if se == 0.0 {
                assert!((m.mean() - x).abs() < 1e-12);
            } else {
                let zs = (m.mean() - x) / se;
                assert!(
                    zs.abs() <= 3.0,
                    "component {k}: {} vs {x} ({zs:+.2}σ)",
                    m.mean()
                );
            }
        }
    }
}

#[test]
fn frequencies_follow_born_probabilities() {
    let pom = sic();
    let rho = hs_mixed_matrix(4, &mut RngStream::new(SEED, 2));
    let n = 1_000_000;
    let counts = simulate_counts(&pom, &rho, n, &mut RngStream::new(SEED, 3)).unwrap();
    assert_eq!(counts.iter().sum::<u64>(), n);
    for (c, p) in counts.iter().zip(pom.probabilities(&rho)) {
        let f = *c as f64 / n as f64;
        assert!((f - p).abs() <= 3.0 * binomial_stderr(p, n), "{f} vs {p}");
    }
    let again = simulate_counts(&pom, &rho, n, &mut RngStream::new(SEED, 3)).unwrap();
    assert_eq!(counts, again);
}

#[test]
fn projective_measurement_of_an_outcome_state() {
    let basis: Vec<ComplexMatrix> = (0..3)
        .map(|i| {
            let mut diag = [0.0; 3];
            diag[i] = 1.0;
            ComplexMatrix::from_real_diag(&diag)
        })
        .collect();
    let pom = Pom::new(3, None, basis.clone()).unwrap();
    let counts = simulate_counts(&pom, &basis[1], 500, &mut RngStream::new(SEED, 0)).unwrap();
    assert_eq!(counts, vec![0, 500, 0]);
}

#[test]
fn mse_matches_formula_for_every_state() {
    let pom = sic();
    let wom = wom_from_rank_one(&pom).unwrap();
    let dims = two_qubits();
    let states = [
        ("mixed", ComplexMatrix::identity(4).scale(0.25)),
        ("bell", PureState::maximally_entangled(dims).projector()),
        (
            "random",
            hs_mixed_matrix(4, &mut RngStream::new(SEED, u64::MAX)),
        ),
    ];
    let wom_model = MseModel::Wom {
        lambda_max: wom.lambda_max(),
    };
    for (kind, p, model) in [
        ("sic", &pom, MseModel::Sic),
        ("wom", wom.as_pom(), wom_model),
    ] {
        let dual = DualFrame::new(p).unwrap();
        for (label, rho) in &states {
            let run = mse_experiment(MseJob {
                pom: p,
                dual: &dual,
                rho,
                n: 100,
                trials: 10_000,
                seed: SEED,
                model,
                pom_kind: kind,
                state_label: label,
            })
            .unwrap();
            let z = (run.empirical_mse - run.formula_mse) / run.stderr;
            assert!(z.abs() <= 3.0, "{kind}/{label}: {run:?} ({z:+.2}σ)");
        }
    }
}

#[test]
fn haar_two_qubit_squared_concurrence() {
    let dims = two_qubits();
    let m = sampled_moments(SEED, 0, 200_000, |rng| {
        pure_concurrence(&haar_pure(dims, rng)).unwrap().powi(2)
    });
    let z = (m.mean() - 0.4) / m.mean_stderr();
    assert!(z.abs() <= 3.0, "{} ({z:+.2}σ)", m.mean());
}

#[test]
fn hs_states_average_to_maximally_mixed() {
    let n = 20_000;
    let mut acc = ComplexMatrix::zeros(4, 4);
    let mut rng = RngStream::new(SEED, 5);
    for _ in 0..n {
        acc = &acc + &hs_mixed_matrix(4, &mut rng);
    }
    let mean = acc.scale(1.0 / n as f64);
    assert!(mean.max_abs_diff(&ComplexMatrix::identity(4).scale(0.25)) < 5e-3);
}

/// Kolmogorov-Smirnov distance of the Haar eigenphases from uniform.
#[test]
fn haar_unitary_phases_are_uniform() {
    let mut rng = RngStream::new(SEED, 6);
    let mut phases = Vec::new();
    for _ in 0..2_000 {
        let u = haar_unitary(3, &mut rng);
        // Each eigenphase is uniform; the first diagonal phase of U is too.
        phases.push(u.as_slice()[0].arg());
    }
    phases.sort_by(f64::total_cmp);
    let n = phases.len() as f64;
    let ks = phases
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let cdf = (p + PI) / (2.0 * PI);
            (cdf - i as f64 / n)
                .abs()
                .max(((i + 1) as f64 / n - cdf).abs())
        })
        .fold(0.0, f64::max);
    // 1.63 / sqrt(n) is the 1% critical value.
    assert!(ks < 1.63 / n.sqrt(), "KS {ks}");
}

#[test]
fn histograms_are_reproducible() {
    let det = Detector::sic_wom(&Fiducial::shipped_d4()).unwrap();
    let mut cfg = ExperimentConfig::new(SEED, 30_000, StateClass::MixedHs);
    cfg.workers = 1;
    let a = detection_ratio_experiment(&cfg, &det).unwrap();
    cfg.workers = 2;
    let b = detection_ratio_experiment(&cfg, &det).unwrap();
    assert_eq!(a, b);
}

#[test]
fn wom_pure_curve_rises_to_one() {
    let det = Detector::sic_wom(&Fiducial::shipped_d4()).unwrap();
    let cfg = ExperimentConfig::new(SEED, 1_000_000, StateClass::PureHaar);
    let r = detection_ratio_experiment(&cfg, &det).unwrap();
    assert_eq!(r.summary.false_positives, 0);
    let rows: Vec<(f64, f64)> = r
        .histogram
        .bins
        .iter()
        .filter_map(|b| b.ratio.map(|p| (p, binomial_stderr(p, b.total))))
        .collect();
    for w in rows.windows(2) {
        let ((p, s), (q, t)) = (w[0], w[1]);
        assert!(q >= p - 3.0 * s.hypot(t), "{p} then {q}");
    }
    let top = r.histogram.bins.last().unwrap().ratio.unwrap();
    assert!(top > 0.99, "top bin {top}");
}

#[test]
fn sic_pom_misses_nearly_maximal_pure_states() {
    let det = Detector::sic_pom(&Fiducial::shipped_d4()).unwrap();
    let mut cfg = ExperimentConfig::new(SEED, 200_000, StateClass::PureHaar);
    cfg.bins = 50;
    let r = detection_ratio_experiment(&cfg, &det).unwrap();
    // Fiducial concurrence sqrt(2/5) bounds detection at q <= 2 sqrt(0.24).
    let edge = 2.0 * 0.24f64.sqrt();
    for b in r.histogram.bins.iter().filter(|b| b.bin_lo >= edge - 1e-12) {
        assert_eq!(b.detected, 0, "{b:?}");
    }
    assert!(r.summary.detected > 0);
}

#[test]
fn wom_outcomes_are_partial_transpose_witnesses() {
    let pom = sic();
    let wom = wom_from_rank_one(&pom).unwrap();
    let witnesses: Vec<_> = pom
        .rank_one_form()
        .unwrap()
        .states
        .iter()
        .map(|v| pt_witness(&PureState::new(two_qubits(), v.clone()).unwrap()).unwrap())
        .collect();
    let mut rng = RngStream::new(SEED, 7);
    for _ in 0..5_000 {
        let rho = hs_mixed(two_qubits(), &mut rng);
        let flags = wom_detects(&wom, &rho).unwrap().flags;
        for (w, f) in witnesses.iter().zip(flags) {
            assert_eq!(detects(w, &rho).unwrap(), f);
        }
    }
}

#[test]
fn maximally_mixed_state_is_never_detected() {
    let dims = two_qubits();
    let w = pt_witness(&PureState::maximally_entangled(dims)).unwrap();
    assert!(!detects(&w, &DensityOperator::maximally_mixed(dims)).unwrap());
    let wom = wom_from_rank_one(&sic()).unwrap();
    assert!(
        !wom_detects(&wom, &DensityOperator::maximally_mixed(dims))
            .unwrap()
            .any
    );
}

#[test]
fn purity_table_approaches_pure_value() {
    // Nine bins put the first edge at purity 1/3, inside the separable ball.
    let t = mixed_detection_vs_purity(SEED, 400_000, 9).unwrap();
    let low = &t.rows[0];
    assert_eq!(low.detected, 0, "{low:?}");
    // HS states almost never reach purity near 1, so only populated bins
    // are compared with the pure-state value 1/8 as an upper bound.
    for r in t.rows.iter().filter(|r| r.entangled >= 100) {
        let f = r.fraction.unwrap();
        assert!(f <= 0.125 + 3.0 * binomial_stderr(f, r.entangled), "{r:?}");
    }
    eprintln!("purity table monotone: {}", t.monotone);
    for r in &t.rows {
        eprintln!("{r:?}");
    }
}

#[test]
fn hermitian_spectra_survive_unitary_conjugation() {
    let mut rng = RngStream::new(SEED, 8);
    for _ in 0..200 {
        let rho = hs_mixed_matrix(4, &mut rng);
        let u = haar_unitary(4, &mut rng);
        let a = hermitian_eig(&rho).unwrap().eigenvalues;
        let b = hermitian_eig(&u.matmul(&rho).matmul(&u.adjoint()))
            .unwrap()
            .eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
