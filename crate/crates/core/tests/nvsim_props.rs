use nvqpt::lindblad::{Superoperator, TimeSchedule};
use nvqpt::nvsim::*;
use nvqpt::numkit::eig_hermitian;
use nvqpt::pipeline::reconstruct;
use nvqpt::qpt::{chi_to_affine, AffineMap, InputStateSet};
use nvqpt::qstate::PauliExpectations;

fn at_time(rec: &ExperimentRecord, m: usize) -> [PauliExpectations; 4] {
    std::array::from_fn(|j| rec.expectations[j][m])
}

#[test]
fn infinite_t1_is_pure_dephasing() {
    let cfg = SimConfig { t1_ns: f64::INFINITY, t2_ns: 60.0, ..SimConfig::noise_free() };
    for t in [0.0f64, 20.0, 80.0, 300.0] {
        let d = (-t / 60.0).exp();
        let want = AffineMap::from_parts([[d, 0.0, 0.0], [0.0, d, 0.0], [0.0, 0.0, 1.0]], [0.0; 3]).unwrap();
        assert!(chi_to_affine(&true_chi(&cfg, t).unwrap()).max_abs_diff(&want) < 1e-12);
    }
}

#[test]
fn t2_at_twice_t1_is_amplitude_damping() {
    let t1 = 150.0;
    let cfg = SimConfig { t1_ns: t1, t2_ns: 2.0 * t1, ..SimConfig::noise_free() };
    let excited = prepare_inputs(&cfg).unwrap()[1].clone();
    for t in [10.0, 75.0, 400.0] {
        let out = true_propagator(&cfg, t).unwrap().apply(excited.matrix()).unwrap();
        let sz = out[(0, 0)].re - out[(1, 1)].re;
        assert!((sz - (1.0 - 2.0 * (-t / t1).exp())).abs() < 1e-12);
        let aff = chi_to_affine(&true_chi(&cfg, t).unwrap());
        let s = (-t / (2.0 * t1)).exp();
        assert!((aff.e()[0][0] - s).abs() < 1e-12 && (aff.e()[1][1] - s).abs() < 1e-12);
    }
}

#[test]
fn zero_time_propagator_is_identity() {
    let p = true_propagator(&SimConfig::default(), 0.0).unwrap();
    assert!(p.matrix().max_abs_diff(Superoperator::identity().matrix()) < 1e-15);
}

#[test]
fn unphysical_relaxation_rejected() {
    let cfg = SimConfig { t1_ns: 100.0, t2_ns: 201.0, ..SimConfig::default() };
    assert!(true_gks(&cfg).is_err());
    assert!(run_experiment(&cfg, &TimeSchedule::doubling(20.0).unwrap()).is_err());
}

#[test]
fn pulse_error_and_folding() {
    let cfg = SimConfig { pulse_error: 0.01, ..SimConfig::default() };
    let ins = prepare_inputs(&cfg).unwrap();
    assert!((ins[1].bloch().z + (0.01 * std::f64::consts::PI).cos()).abs() < 1e-12);

    let cfg = SimConfig { fold_polarization: true, alpha: 0.4, ..SimConfig::default() };
    for (got, want) in prepare_inputs(&cfg).unwrap().iter().zip(InputStateSet::canonical().states().iter().map(|s| s.bloch())) {
        for (g, w) in got.bloch().as_array().iter().zip(want.as_array()) {
            assert!((g - 0.4 * w).abs() < 1e-12);
        }
    }
}

#[test]
fn readout_noise_width() {
    let cfg = SimConfig::default();
    let rho = prepare_inputs(&cfg).unwrap()[2].clone();
    let samples: Vec<f64> = (0..200)
        .map(|seed| measure_expectations(&rho, &SimConfig { seed, ..cfg }).sz.unwrap())
        .collect();
    let mean = samples.iter().sum::<f64>() / 200.0;
    let sd = (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / 199.0).sqrt();
    assert!((sd - 0.01).abs() <= 0.002, "sd {sd}");
}

#[test]
fn records_are_deterministic_and_valid() {
    let schedule = TimeSchedule::doubling(20.0).unwrap();
    let cfg = SimConfig { seed: 42, ..SimConfig::default() };
    let a = run_experiment(&cfg, &schedule).unwrap();
    assert_eq!(a, run_experiment(&cfg, &schedule).unwrap());
    assert_ne!(a, run_experiment(&SimConfig { seed: 43, ..cfg }, &schedule).unwrap());
    for row in &a.expectations {
        for e in row {
            for v in e.components() {
                assert!(v.unwrap().abs() <= 1.0);
            }
        }
    }

    let exact = run_experiment(&SimConfig { t1_ns: 80.0, t2_ns: 30.0, detuning: 0.02, ..SimConfig::noise_free() }, &schedule).unwrap();
    for row in &exact.expectations {
        for e in row {
            let r: f64 = e.components().iter().map(|v| v.unwrap().powi(2)).sum();
            assert!(r <= 1.0 + 1e-9);
        }
    }
}

#[test]
fn folded_and_rescaled_matches_full_polarization() {
    let schedule = TimeSchedule::doubling(20.0).unwrap();
    let base = SimConfig { t1_ns: 300.0, t2_ns: 100.0, detuning: 0.01, ..SimConfig::noise_free() };
    let plain = run_experiment(&base, &schedule).unwrap();
    for alpha in [0.4, 0.75] {
        let folded = run_experiment(&SimConfig { fold_polarization: true, alpha, ..base }, &schedule).unwrap();
        for m in 0..3 {
            let a = reconstruct(&at_time(&plain, m), None).unwrap();
            let b = reconstruct(&at_time(&folded, m), Some(alpha)).unwrap();
            assert!(a.chi.matrix().max_abs_diff(b.chi.matrix()) <= 1e-9);
        }
    }
}

fn unphysical_fraction(shots: u64) -> f64 {
    let schedule = TimeSchedule::new(20.0, 1).unwrap();
    let hits = (0..200u64)
        .filter(|&seed| {
            let rec = run_experiment(&SimConfig { shots, seed, ..SimConfig::default() }, &schedule).unwrap();
            let raw = reconstruct(&at_time(&rec, 0), None).unwrap();
            eig_hermitian(raw.chi.matrix()).unwrap().min() < 0.0
        })
        .count();
    hits as f64 / 200.0
}

#[test]
fn fewer_shots_more_unphysical_estimates() {
    let fractions: Vec<f64> = [1_000_000, 10_000, 100].iter().map(|&s| unphysical_fraction(s)).collect();
    for w in fractions.windows(2) {
        assert!(w[1] >= w[0], "{fractions:?}");
    }
    assert!(fractions[2] > fractions[0], "{fractions:?}");
}
