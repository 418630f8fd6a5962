//! Regression against the printed process matrices, discrepancy table and
//! Lindblad operators in fixtures/published.toml.

use nvqpt::cpfit::{clip_negative_eigs, project_to_cp, ProjectionOptions};
use nvqpt::lindblad::{propagator_from_outputs, relative_contributions, GeneratorFitOptions, Superoperator, TimeSchedule};
use nvqpt::numkit::CMatrix;
use nvqpt::pipeline::{estimate_generator, PublishedData};
use nvqpt::qpt::{apply_chi, chi_to_affine, ellipsoid_samples, kraus_from_chi, tp_defect, unphysicality_norms};
use nvqpt::qstate::{bloch_to_density, density_to_bloch, BlochVector, DensityMatrix};
use nvqpt::Tolerances;

fn data() -> PublishedData {
    PublishedData::from_toml_str(include_str!("../fixtures/published.toml")).unwrap()
}

#[test]
fn frobenius_discrepancies_match_table() {
    let d = data();
    assert_eq!(d.process.len(), 3);
    for p in &d.process {
        let n = unphysicality_norms(&p.experimental_chi().unwrap(), &p.reconstructed_chi().unwrap()).unwrap();
        let want = d.discrepancy_at(p.time_ns).unwrap().fro;
        assert!((n.fro - want).abs() <= 0.01, "t={}: {} vs {want}", p.time_ns, n.fro);
    }
}

#[test]
fn experimental_processes_are_not_completely_positive() {
    let d = data();
    for p in &d.process {
        let chi = p.experimental_chi().unwrap();
        assert!(chi.min_eigenvalue() < -1e-4, "t={}", p.time_ns);
    }
    let first = d.process[0].experimental_chi().unwrap();
    assert!(kraus_from_chi(&first).is_err());
}

#[test]
fn clipping_moves_by_the_negative_spectrum() {
    let chi = data().process[0].experimental_chi().unwrap();
    let negative: f64 = chi.eigenvalues().iter().filter(|&&x| x < 0.0).map(|x| x * x).sum();
    let moved = (chi.matrix() - clip_negative_eigs(&chi).matrix()).frobenius_norm();
    assert!((moved - negative.sqrt()).abs() < 1e-12);
}

#[test]
fn projection_is_competitive() {
    let d = data();
    for p in &d.process {
        let r = project_to_cp(&p.experimental_chi().unwrap(), &ProjectionOptions::default()).unwrap();
        let table = d.discrepancy_at(p.time_ns).unwrap().fro;
        let diag = r.diagnostics;
        assert!(diag.distance_fro <= table + 0.01, "t={}: {}", p.time_ns, diag.distance_fro);
        assert!(diag.min_eigenvalue >= -1e-9);
        assert!(diag.tp_defect <= 1e-3);
        assert!(r.success && r.deviation <= r.start_deviation);
        let off = chi_to_affine(&r.chi_tilde).max_abs_diff(&p.reconstructed_affine().unwrap());
        assert!(off <= 0.02, "t={}: affine off by {off}", p.time_ns);
    }
}

#[test]
fn printed_reconstructions_are_nearly_physical() {
    for p in &data().process {
        let chi = p.reconstructed_chi().unwrap();
        assert!(tp_defect(&chi) <= 0.01);
        let worst = ellipsoid_samples(&p.reconstructed_affine().unwrap(), 2000)
            .unwrap()
            .iter()
            .map(|s| s.output.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        assert!(worst <= 1.0 + 1e-6, "t={}: {worst}", p.time_ns);
    }
}

#[test]
fn chi_action_matches_affine_action() {
    let p = &data().process[0];
    let chi = p.experimental_chi().unwrap();
    let affine = p.experimental_affine().unwrap();
    for r in [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.3, 0.4, -0.5]] {
        let rho = bloch_to_density(BlochVector::from_array(r)).unwrap();
        let out = apply_chi(&chi, rho.matrix());
        // the experimental map can leave the ball, so read the Bloch vector without validation
        let want = affine.apply(r);
        let bloch = [2.0 * out[(1, 0)].re, 2.0 * out[(1, 0)].im, (out[(0, 0)] - out[(1, 1)]).re];
        for k in 0..3 {
            assert!((bloch[k] - want[k]).abs() < 1e-12);
        }
    }
    let plus = DensityMatrix::new(bloch_to_density(BlochVector::from_array([1.0, 0.0, 0.0])).unwrap().into_matrix()).unwrap();
    let rec = p.reconstructed_chi().unwrap();
    let out = DensityMatrix::new(apply_chi(&rec, plus.matrix()).hermitian_part()).unwrap();
    let want = p.reconstructed_affine().unwrap().apply([1.0, 0.0, 0.0]);
    let got = density_to_bloch(&out).as_array();
    for k in 0..3 {
        assert!((got[k] - want[k]).abs() < 1e-9);
    }
}

#[test]
fn printed_lindblad_contributions() {
    let ops: Vec<CMatrix> = data().lindblad.iter().map(|l| l.operator()).collect();
    let got = relative_contributions(&ops);
    let printed: Vec<f64> = data().lindblad.iter().map(|l| l.contribution_percent).collect();
    for (g, w) in got.iter().zip(&printed) {
        assert!((100.0 * g - w).abs() <= 0.2, "{} vs {w}", 100.0 * g);
    }
}

#[test]
fn fitted_generator_is_dominated_by_z_dephasing() {
    let d = data();
    let props: Vec<Superoperator> = d
        .process
        .iter()
        .map(|p| propagator_from_outputs(&p.reconstructed_affine().unwrap().canonical_outputs()).unwrap())
        .collect();
    for p in &props {
        assert!(p.trace_defect() < 1e-12);
    }
    let schedule = TimeSchedule::doubling(20.0).unwrap();
    let zero = Superoperator::zero();
    let est = estimate_generator(&props, &zero, &schedule, &GeneratorFitOptions::default(), &Tolerances::default()).unwrap();
    assert!(est.fit.residual <= est.fit.start_residual);
    let dominant = &est.lindblads.ops()[0];
    assert!(est.lindblads.contributions()[0] > 0.85);
    // sigma_z-like: weight on the diagonal, equal and opposite
    let diag = dominant[(0, 0)].norm_sqr() + dominant[(1, 1)].norm_sqr();
    assert!(diag / dominant.frobenius_norm().powi(2) > 0.9);
    assert!((dominant[(0, 0)] + dominant[(1, 1)]).norm() < 1e-9);
}
