#![allow(dead_code)]

use nvqpt::numkit::{c, CMatrix};
use proptest::prelude::*;

pub fn entries(n: usize, scale: f64) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-scale..scale, -scale..scale), n)
}

pub fn complex_matrix(rows: usize, cols: usize, scale: f64) -> impl Strategy<Value = CMatrix> {
    entries(rows * cols, scale).prop_map(move |v| CMatrix::from_fn(rows, cols, |i, j| {
        let (re, im) = v[i * cols + j];
        c(re, im)
    }))
}

pub fn hermitian(n: usize, scale: f64) -> impl Strategy<Value = CMatrix> {
    complex_matrix(n, n, scale).prop_map(|m| m.hermitian_part())
}

/// G G^dag, possibly rank deficient when `rank < n`.
pub fn psd(n: usize, rank: usize, scale: f64) -> impl Strategy<Value = CMatrix> {
    complex_matrix(n, rank, scale).prop_map(|g| &g * &g.adjoint())
}

/// Random single-qubit density matrix from a Bloch vector inside the ball.
pub fn bloch_vector() -> impl Strategy<Value = [f64; 3]> {
    (0.0..1.0f64, -1.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, z, phi)| {
        let s = (1.0 - z * z).sqrt();
        [r * s * phi.cos(), r * s * phi.sin(), r * z]
    })
}

pub fn frob(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).frobenius_norm()
}

pub fn apply_kraus(ks: &[CMatrix], rho: &CMatrix) -> CMatrix {
    ks.iter().fold(CMatrix::zeros(2, 2), |acc, k| &acc + &(&(k * rho) * &k.adjoint()))
}

/// Random CPTP map as Kraus operators K_i S^(-1/2), S = sum K_i^dag K_i.
pub fn cptp_kraus() -> impl Strategy<Value = Vec<CMatrix>> {
    prop::collection::vec(complex_matrix(2, 2, 1.0), 1..4).prop_map(|ks| {
        let s = ks.iter().fold(CMatrix::zeros(2, 2), |acc, k| &acc + &(&k.adjoint() * k));
        let inv_sqrt = nvqpt::numkit::eig_hermitian(&s).unwrap().reconstruct_with(|x| 1.0 / x.sqrt());
        ks.iter().map(|k| k * &inv_sqrt).collect()
    })
}

/// Normal-basis chi of a Kraus map, from its canonical outputs.
pub fn chi_of_kraus(ks: &[CMatrix]) -> nvqpt::qpt::ChiMatrix {
    let outs = nvqpt::qpt::InputStateSet::canonical().states().clone().map(|s| apply_kraus(ks, s.matrix()));
    nvqpt::qpt::chi_from_outputs(&outs).unwrap()
}
