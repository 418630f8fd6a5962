//! Single-qubit states: Bloch vectors, pseudopure preparation, MaxEnt
//! reconstruction from Pauli expectations, and state distances.
//!
//! Pole convention: |0> sits at r_z = +1, so rho = (I + r.sigma) / 2 and
//! sigma_z |0> = +|0>.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{c, cr, eig_hermitian, paulis, psd_sqrt, CMatrix};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

/// 2x2 Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to `tol.state`.
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::new_with(m, &Tolerances::default())
    }

    pub fn new_with(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        if m.shape() != (2, 2) {
            return Err(Error::InvalidState(format!("expected 2x2, got {:?}", m.shape())));
        }
        m.require_finite()?;
        let herm = m.hermitian_deviation();
        if herm > tol.state {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = m.trace();
        if (tr - cr(1.0)).norm() > tol.state {
            return Err(Error::InvalidState(format!("trace {:.9} != 1", tr.re)));
        }
        let min = eig_hermitian(&m)?.min();
        if min < -tol.state {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self(m))
    }

    /// Pure state |psi><psi|; psi is normalized here.
    pub fn pure(psi: [C64; 2]) -> Result<Self> {
        let norm = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let v = [psi[0] / norm, psi[1] / norm];
        Ok(Self(CMatrix::from_fn(2, 2, |i, j| v[i] * v[j].conj())))
    }

    pub fn maximally_mixed() -> Self {
        Self(CMatrix::identity(2).scale_real(0.5))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn bloch(&self) -> BlochVector {
        density_to_bloch(self)
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        let e = eig_hermitian(&self.0).expect("2x2 finite matrix");
        [e.eigenvalues[0], e.eigenvalues[1]]
    }
}

/// rho = (I + r.sigma) / 2. Norms within `tol.state` above one are pulled
/// back onto the sphere.
pub fn bloch_to_density(r: BlochVector) -> Result<DensityMatrix> {
    bloch_to_density_with(r, &Tolerances::default())
}

pub fn bloch_to_density_with(r: BlochVector, tol: &Tolerances) -> Result<DensityMatrix> {
    let norm = r.norm();
    if !norm.is_finite() || norm > 1.0 + tol.state {
        return Err(Error::InvalidState(format!("Bloch vector norm {norm} exceeds 1")));
    }
    let r = if norm > 1.0 { r.scaled(1.0 / norm) } else { r };
    Ok(DensityMatrix(bloch_matrix(r)))
}

/// (I + r.sigma)/2 without any validation; used for affine images that may
/// leave the ball.
pub(crate) fn bloch_matrix(r: BlochVector) -> CMatrix {
    CMatrix::from_rows(&[
        [cr(0.5 * (1.0 + r.z)), c(0.5 * r.x, -0.5 * r.y)],
        [c(0.5 * r.x, 0.5 * r.y), cr(0.5 * (1.0 - r.z))],
    ])
}

pub fn density_to_bloch(rho: &DensityMatrix) -> BlochVector {
    bloch_components(rho.matrix())
}

/// r_i = tr(M sigma_i) for any 2x2 matrix (real part).
pub(crate) fn bloch_components(m: &CMatrix) -> BlochVector {
    let [sx, sy, sz] = paulis();
    BlochVector::new(
        (m * &sx).trace().re,
        (m * &sy).trace().re,
        (m * &sz).trace().re,
    )
}

/// (1 - alpha) I/2 + alpha |psi><psi| for one qubit.
pub fn make_pseudopure(alpha: f64, psi: [C64; 2]) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("polarization {alpha} outside [0, 1]")));
    }
    let pure = DensityMatrix::pure(psi)?;
    let m = &CMatrix::identity(2).scale_real(0.5 * (1.0 - alpha)) + &pure.0.scale_real(alpha);
    Ok(DensityMatrix(m))
}

/// Pauli expectation values; `None` marks an unmeasured component.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PauliExpectations {
    pub sx: Option<f64>,
    pub sy: Option<f64>,
    pub sz: Option<f64>,
}

impl PauliExpectations {
    pub fn all(sx: f64, sy: f64, sz: f64) -> Self {
        Self { sx: Some(sx), sy: Some(sy), sz: Some(sz) }
    }

    pub fn from_bloch(r: BlochVector) -> Self {
        Self::all(r.x, r.y, r.z)
    }

    pub fn components(&self) -> [Option<f64>; 3] {
        [self.sx, self.sy, self.sz]
    }

    pub fn validate(&self) -> Result<()> {
        for v in self.components().into_iter().flatten() {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("expectation {v} outside [-1, 1]")));
            }
        }
        Ok(())
    }
}

/// What the MaxEnt estimator had to do to produce a physical state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MaxEntReport {
    /// Components that were not measured and were set to zero.
    pub zero_filled: [bool; 3],
    /// Norm of the measured sub-vector when it had to be scaled onto the
    /// unit sphere.
    pub scaled_from: Option<f64>,
}

/// Maximum-entropy state compatible with the measured expectations.
///
/// For one qubit with linear constraints the MaxEnt state has zero Bloch
/// components along unmeasured axes. A measured sub-vector outside the ball
/// is scaled radially onto the unit sphere, the closest physical match.
pub fn maxent_reconstruct(e: &PauliExpectations) -> DensityMatrix {
    maxent_reconstruct_report(e).0
}

pub fn maxent_reconstruct_report(e: &PauliExpectations) -> (DensityMatrix, MaxEntReport) {
    let comps = e.components();
    let mut report = MaxEntReport::default();
    let mut r = [0.0; 3];
    for (k, v) in comps.iter().enumerate() {
        match v {
            Some(x) if x.is_finite() => r[k] = *x,
            _ => report.zero_filled[k] = true,
        }
    }
    let mut b = BlochVector::from_array(r);
    let norm = b.norm();
    if norm > 1.0 {
        report.scaled_from = Some(norm);
        b = b.scaled(1.0 / norm);
    }
    (DensityMatrix(bloch_matrix(b)), report)
}

/// Trace distance (1/2) tr|A - B| between Hermitian matrices of any size.
pub fn trace_distance_matrices(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let d = a - b;
    Ok(0.5 * eig_hermitian(&d)?.eigenvalues.iter().map(|x| x.abs()).sum::<f64>())
}

/// Uhlmann fidelity (tr sqrt(sqrt(A) B sqrt(A)))^2, clamped to [0, 1].
pub fn fidelity_matrices(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let sa = psd_sqrt(a)?;
    let inner = &(&sa * b) * &sa;
    let root_trace: f64 = eig_hermitian(&inner)?
        .eigenvalues
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    trace_distance_matrices(&a.0, &b.0).expect("valid 2x2 states")
}

pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    fidelity_matrices(&a.0, &b.0).expect("valid 2x2 states")
}

pub fn bures_from_fidelity(f: f64) -> f64 {
    (2.0 - 2.0 * f.clamp(0.0, 1.0).sqrt()).max(0.0).sqrt()
}

pub fn c_metric_from_fidelity(f: f64) -> f64 {
    (1.0 - f.clamp(0.0, 1.0)).max(0.0).sqrt()
}

pub fn bures(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    bures_from_fidelity(fidelity(a, b))
}

pub fn c_metric(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    c_metric_from_fidelity(fidelity(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ket0() -> [C64; 2] {
        [cr(1.0), cr(0.0)]
    }

    #[test]
    fn pole_convention() {
        let rho = bloch_to_density(BlochVector::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(rho.matrix(), &CMatrix::from_real_diag(&[1.0, 0.0]));
        let mixed = bloch_to_density(BlochVector::default()).unwrap();
        assert_eq!(mixed, DensityMatrix::maximally_mixed());
        let plus = bloch_to_density(BlochVector::new(1.0, 0.0, 0.0)).unwrap();
        assert!(plus
            .matrix()
            .max_abs_diff(&CMatrix::from_real_rows(&[[0.5, 0.5], [0.5, 0.5]]))
            < 1e-15);
    }

    #[test]
    fn bloch_norm_limits() {
        assert!(bloch_to_density(BlochVector::new(0.0, 0.0, 1.0 + 5e-10)).is_ok());
        assert!(bloch_to_density(BlochVector::new(0.0, 0.8, 0.8)).is_err());
    }

    #[test]
    fn pseudopure_seventy_percent() {
        let rho = make_pseudopure(0.4, ket0()).unwrap();
        assert!(rho.matrix().max_abs_diff(&CMatrix::from_real_diag(&[0.7, 0.3])) < 1e-15);
        let pure = make_pseudopure(1.0, ket0()).unwrap();
        assert_eq!(pure, DensityMatrix::pure(ket0()).unwrap());
        let mixed = make_pseudopure(0.0, ket0()).unwrap();
        assert_eq!(mixed, DensityMatrix::maximally_mixed());
        assert!(make_pseudopure(1.2, ket0()).is_err());
    }

    #[test]
    fn maxent_zero_fill() {
        let e = PauliExpectations { sx: None, sy: None, sz: Some(0.4) };
        let (rho, rep) = maxent_reconstruct_report(&e);
        assert!(rho.matrix().max_abs_diff(&CMatrix::from_real_diag(&[0.7, 0.3])) < 1e-15);
        assert_eq!(rep.zero_filled, [true, true, false]);
        assert_eq!(rep.scaled_from, None);
        let all_missing = maxent_reconstruct(&PauliExpectations::default());
        assert_eq!(all_missing, DensityMatrix::maximally_mixed());
    }

    #[test]
    fn maxent_inside_ball_is_exact() {
        let rho = maxent_reconstruct(&PauliExpectations::all(0.3, 0.0, 0.4));
        let r = rho.bloch();
        assert!((r.x - 0.3).abs() < 1e-15 && r.y.abs() < 1e-15 && (r.z - 0.4).abs() < 1e-15);
    }

    #[test]
    fn maxent_scales_onto_sphere() {
        let (rho, rep) = maxent_reconstruct_report(&PauliExpectations::all(0.8, 0.8, 0.8));
        let r = rho.bloch();
        let k = 1.0 / 3f64.sqrt();
        assert!((r.norm() - 1.0).abs() < 1e-12);
        for v in r.as_array() {
            assert!((v - k).abs() < 1e-12);
        }
        assert!((rep.scaled_from.unwrap() - 0.8 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn distances_closed_forms() {
        let zero = DensityMatrix::pure(ket0()).unwrap();
        let one = DensityMatrix::pure([cr(0.0), cr(1.0)]).unwrap();
        let mixed = DensityMatrix::maximally_mixed();
        assert_eq!(trace_distance(&zero, &zero), 0.0);
        assert!((trace_distance(&zero, &one) - 1.0).abs() < 1e-12);
        let rho = make_pseudopure(0.4, ket0()).unwrap();
        assert!((trace_distance(&rho, &mixed) - 0.2).abs() < 1e-12);

        assert!((fidelity(&zero, &zero) - 1.0).abs() < 1e-12);
        assert!(bures(&zero, &zero).abs() < 1e-6);
        assert!(fidelity(&zero, &one).abs() < 1e-12);
        assert!((bures(&zero, &one) - 2f64.sqrt()).abs() < 1e-9);
        assert!((c_metric(&zero, &one) - 1.0).abs() < 1e-9);
    }
}
