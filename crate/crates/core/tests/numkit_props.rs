mod common;

use common::{complex_matrix, frob, hermitian, psd};
use nvqpt::numkit::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermitian_eig_reconstructs(m in hermitian(4, 2.0)) {
        let e = eig_hermitian(&m).unwrap();
        let scale = m.frobenius_norm().max(1.0);
        prop_assert!(frob(&e.reconstruct(), &m) <= 1e-10 * scale);
        let vdv = &e.eigenvectors.adjoint() * &e.eigenvectors;
        prop_assert!(frob(&vdv, &CMatrix::identity(4)) <= 1e-10);
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let sum: f64 = e.eigenvalues.iter().sum();
        prop_assert!((sum - m.trace().re).abs() <= 1e-9);
    }

    #[test]
    fn cholesky_round_trip(m in psd(4, 4, 1.0), r in psd(4, 2, 1.0)) {
        for a in [m, r] {
            let l = cholesky_lower(&a).unwrap();
            prop_assert!(frob(&(&l * &l.adjoint()), &a) <= 1e-8);
            for i in 0..4 {
                prop_assert!(l[(i, i)].im == 0.0 && l[(i, i)].re >= 0.0);
                for j in (i + 1)..4 {
                    prop_assert!(l[(i, j)] == cr(0.0));
                }
            }
        }
    }

    #[test]
    fn pseudoinverse_penrose_conditions(m in complex_matrix(3, 5, 2.0)) {
        let p = pseudoinverse(&m).unwrap();
        prop_assert!(frob(&(&(&m * &p) * &m), &m) <= 1e-8);
        prop_assert!(frob(&(&(&p * &m) * &p), &p) <= 1e-8);
    }

    #[test]
    fn log_inverts_exp_in_strip(a in complex_matrix(4, 4, 0.6)) {
        // ||A||_2 <= ||A||_F < pi keeps the spectrum inside the strip
        let e = matrix_exp(&a).unwrap();
        let l = matrix_log_principal(&e).unwrap();
        prop_assert!(frob(&l, &a) <= 1e-8 * a.frobenius_norm().max(1.0));
        prop_assert!(frob(&matrix_exp(&l).unwrap(), &e) <= 1e-8 * e.frobenius_norm().max(1.0));
    }

    #[test]
    fn richardson_exact_on_cubic_matrix_polynomials(
        coeffs in prop::collection::vec(complex_matrix(2, 2, 1.0), 4),
        t1 in 0.01..1.0f64,
    ) {
        let f = |t: f64| {
            (0..4).fold(CMatrix::zeros(2, 2), |acc, k| &acc + &coeffs[k].scale_real(t.powi(k as i32)))
        };
        let d = richardson_derivative(&[f(t1), f(2.0 * t1), f(4.0 * t1)], &f(0.0), t1).unwrap();
        prop_assert!(frob(&d, &coeffs[1]) <= 1e-9);
    }

    #[test]
    fn simplex_never_worsens(x0 in prop::collection::vec(-3.0..3.0f64, 3)) {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + x[2]).powi(2) + (x[2] * x[0]).sin();
        let opts = SimplexOptions { max_evaluations: 400, ..SimplexOptions::default() };
        let r = nelder_mead(f, &x0, &opts).unwrap();
        prop_assert!(r.f <= f(&x0));
    }
}

#[test]
fn richardson_on_matrix_exponential() {
    let a = CMatrix::from_rows(&[
        [c(-0.3, 0.1), cr(0.4), c(0.0, 0.2), cr(0.1)],
        [cr(-0.2), c(-0.5, 0.0), cr(0.3), c(0.1, -0.1)],
        [c(0.2, 0.2), cr(0.0), c(-1.0, 0.5), cr(0.2)],
        [cr(0.0), c(0.3, 0.0), cr(-0.1), cr(-0.7)],
    ]);
    let t1 = 0.01;
    let f = |t: f64| matrix_exp(&a.scale_real(t)).unwrap();
    let d = richardson_derivative(&[f(t1), f(2.0 * t1), f(4.0 * t1)], &CMatrix::identity(4), t1).unwrap();
    assert!(frob(&d, &a) <= 1e-4 * a.frobenius_norm());
}

#[test]
fn pauli_x_spectrum() {
    let e = eig_hermitian(&sigma_x()).unwrap();
    assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14 && (e.eigenvalues[1] - 1.0).abs() < 1e-14);
}
