//! Markovian process tomography in Liouville space.
//!
//! Density matrices are column-stacked, v[i + 2j] = rho[i][j], so a map E
//! becomes the 4x4 matrix whose column k is vec(E(devec(e_k))). The trace
//! functional is the fixed row (1, 0, 0, 1).
//!
//! The generator is written -(iH^ + R^) with H^ vec(rho) = vec(H rho - rho H)
//! and the relaxation part expanded over the trace-orthonormal basis
//! F = sigma / sqrt2:
//!
//! -R^ rho = 1/2 sum_ab a_ab ([F_a rho, F_b^dag] + [F_a, rho F_b^dag]).
//!
//! Times are in ns, rates in 1/ns, angular frequencies in rad/ns.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{
    c, cholesky_lower_with, cr, eig_hermitian, matrix_exp, matrix_log_principal_with, nelder_mead, paulis,
    pseudoinverse, richardson_derivative, sigma_z, CMatrix, SimplexOptions,
};
use crate::qpt::{chi_from_unit_images, matrix_unit_images, ChiMatrix};
use crate::qstate::{bloch_components, DensityMatrix, PauliExpectations};
use crate::tolerances::Tolerances;

pub fn vectorize(rho: &CMatrix) -> Result<Vec<C64>> {
    if rho.shape() != (2, 2) {
        return Err(Error::ShapeMismatch(format!("expected 2x2, got {:?}", rho.shape())));
    }
    Ok((0..4).map(|k| rho[(k % 2, k / 2)]).collect())
}

pub fn devectorize(v: &[C64]) -> Result<CMatrix> {
    if v.len() != 4 {
        return Err(Error::ShapeMismatch(format!("expected 4-vector, got length {}", v.len())));
    }
    Ok(CMatrix::from_fn(2, 2, |i, j| v[i + 2 * j]))
}

/// 2x2 operator with a one at vectorized position k.
fn unit(k: usize) -> CMatrix {
    crate::numkit::matrix_unit(2, k % 2, k / 2)
}

/// 4x4 matrix acting on column-stacked 2x2 operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator(CMatrix);

impl Superoperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.shape() != (4, 4) {
            return Err(Error::ShapeMismatch(format!("superoperator must be 4x4, got {:?}", m.shape())));
        }
        m.require_finite()?;
        Ok(Self(m))
    }

    /// Column k = vec(f(e_k)).
    pub fn from_map(f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        let cols: Vec<Vec<C64>> = (0..4)
            .map(|k| vectorize(&f(&unit(k))).expect("map returns 2x2"))
            .collect();
        Self(CMatrix::from_columns(&cols))
    }

    pub fn identity() -> Self {
        Self(CMatrix::identity(4))
    }

    pub fn zero() -> Self {
        Self(CMatrix::zeros(4, 4))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        devectorize(&self.0.apply(&vectorize(rho)?))
    }

    /// Max deviation of the trace row from (1, 0, 0, 1); zero for a
    /// trace-preserving propagator.
    pub fn trace_defect(&self) -> f64 {
        self.trace_row().iter().zip([1.0, 0.0, 0.0, 1.0]).map(|(v, e)| (v - cr(e)).norm()).fold(0.0, f64::max)
    }

    /// (1, 0, 0, 1) M: the trace of each column's image.
    pub fn trace_row(&self) -> [C64; 4] {
        std::array::from_fn(|j| self.0[(0, j)] + self.0[(3, j)])
    }

    /// Images E(|i><j|) indexed [i][j].
    pub fn unit_images(&self) -> [[CMatrix; 2]; 2] {
        let col = |k: usize| devectorize(&self.0.column(k)).expect("4 rows");
        [[col(0), col(2)], [col(1), col(3)]]
    }

    /// Normal-basis process matrix of the map.
    pub fn to_chi(&self) -> ChiMatrix {
        chi_from_unit_images(&self.unit_images())
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self(self.0.scale_real(s))
    }
}

impl std::ops::Add for &Superoperator {
    type Output = Superoperator;
    fn add(self, rhs: Self) -> Superoperator {
        Superoperator(&self.0 + &rhs.0)
    }
}

impl std::ops::Sub for &Superoperator {
    type Output = Superoperator;
    fn sub(self, rhs: Self) -> Superoperator {
        Superoperator(&self.0 - &rhs.0)
    }
}

/// Doubling grid t_m = 2^m t1, m = 0..count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSchedule {
    t1: f64,
    count: usize,
}

impl TimeSchedule {
    pub fn new(t1: f64, count: usize) -> Result<Self> {
        if !(t1 > 0.0 && t1.is_finite()) {
            return Err(Error::Schedule(format!("t1 must be positive, got {t1}")));
        }
        if count == 0 {
            return Err(Error::Schedule("schedule needs at least one time".into()));
        }
        Ok(Self { t1, count })
    }

    pub fn doubling(t1: f64) -> Result<Self> {
        Self::new(t1, 3)
    }

    /// Accepts times that double within `tol.schedule` relative error.
    pub fn from_times(times: &[f64], tol: &Tolerances) -> Result<Self> {
        let Some(&t1) = times.first() else {
            return Err(Error::Schedule("no times given".into()));
        };
        let s = Self::new(t1, times.len())?;
        for (got, want) in times.iter().zip(s.times()) {
            if (got - want).abs() > tol.schedule * want {
                return Err(Error::Schedule(format!("times {times:?} do not double from {t1}")));
            }
        }
        Ok(s)
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.count).map(|m| self.t1 * (1u64 << m) as f64).collect()
    }
}

/// Hermitian 3x3 coefficient matrix over F = sigma / sqrt2.
#[derive(Debug, Clone, PartialEq)]
pub struct GKSMatrix(CMatrix);

impl GKSMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::new_with(m, &Tolerances::default())
    }

    pub fn new_with(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        if m.shape() != (3, 3) {
            return Err(Error::ShapeMismatch(format!("GKS matrix must be 3x3, got {:?}", m.shape())));
        }
        m.require_finite()?;
        let deviation = m.hermitian_deviation();
        if deviation > tol.hermitian {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self(m))
    }

    pub fn zero() -> Self {
        Self(CMatrix::zeros(3, 3))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eig_hermitian(&self.0).expect("finite 3x3").min()
    }
}

/// Nine reals of the lower-triangular factor X with a = X^dag X:
///
/// ```text
/// X = | x1          0           0  |
///     | x4 + i x5   x2          0  |
///     | x8 + i x9   x6 + i x7   x3 |
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GKSParams(pub [f64; 9]);

const GKS_OFF_DIAGONAL: [(usize, usize, usize); 3] = [(1, 0, 3), (2, 1, 5), (2, 0, 7)];

impl GKSParams {
    pub fn factor(&self) -> CMatrix {
        let mut x = CMatrix::zeros(3, 3);
        for i in 0..3 {
            x[(i, i)] = cr(self.0[i]);
        }
        for &(r, col, k) in &GKS_OFF_DIAGONAL {
            x[(r, col)] = c(self.0[k], self.0[k + 1]);
        }
        x
    }

    pub fn from_factor(x: &CMatrix) -> Self {
        let mut p = [0.0; 9];
        for (i, v) in p.iter_mut().take(3).enumerate() {
            *v = x[(i, i)].re;
        }
        for &(r, col, k) in &GKS_OFF_DIAGONAL {
            p[k] = x[(r, col)].re;
            p[k + 1] = x[(r, col)].im;
        }
        Self(p)
    }

    /// Factors a PSD matrix: with the reversal P, P a P = L L^dag and
    /// X = P L^dag P.
    pub fn from_gks(a: &GKSMatrix, tol: &Tolerances) -> Result<Self> {
        let rev = |m: &CMatrix| CMatrix::from_fn(3, 3, |i, j| m[(2 - i, 2 - j)]);
        let l = cholesky_lower_with(&rev(&a.0), tol.psd_pivot)?;
        Ok(Self::from_factor(&rev(&l.adjoint())))
    }
}

/// a = X^dag X, positive semidefinite for every parameter vector.
pub fn gks_matrix(x: &GKSParams) -> GKSMatrix {
    let f = x.factor();
    GKSMatrix((&f.adjoint() * &f).hermitian_part())
}

/// F_a = sigma_a / sqrt2, orthonormal under tr(A^dag B).
pub fn gks_basis() -> [CMatrix; 3] {
    paulis().map(|s| s.scale_real(std::f64::consts::FRAC_1_SQRT_2))
}

fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    &(a * b) - &(b * a)
}

/// R^(a); its trace row vanishes identically.
pub fn dissipator_superop(a: &GKSMatrix) -> Superoperator {
    let f = gks_basis();
    let fd: Vec<CMatrix> = f.iter().map(CMatrix::adjoint).collect();
    Superoperator::from_map(|rho| {
        let mut out = CMatrix::zeros(2, 2);
        for al in 0..3 {
            for be in 0..3 {
                let w = a.0[(al, be)];
                if w == cr(0.0) {
                    continue;
                }
                let term = &commutator(&(&f[al] * rho), &fd[be]) + &commutator(&f[al], &(rho * &fd[be]));
                out = &out + &term.scale(w * -0.5);
            }
        }
        out
    })
}

/// R^ from Lindblad operators: -R^ rho = sum_k L rho L^dag - {L^dag L, rho}/2.
pub fn dissipator_from_lindblads(ops: &[CMatrix]) -> Superoperator {
    Superoperator::from_map(|rho| {
        let mut out = CMatrix::zeros(2, 2);
        for l in ops {
            let ld = l.adjoint();
            let ldl = &ld * l;
            let jump = &(l * rho) * &ld;
            let anti = &(&ldl * rho) + &(rho * &ldl);
            out = &out + &(&jump - &anti.scale_real(0.5));
        }
        out.scale_real(-1.0)
    })
}

/// H^ vec(rho) = vec(H rho - rho H).
pub fn hamiltonian_superop(h: &CMatrix) -> Result<Superoperator> {
    hamiltonian_superop_with(h, &Tolerances::default())
}

pub fn hamiltonian_superop_with(h: &CMatrix, tol: &Tolerances) -> Result<Superoperator> {
    if h.shape() != (2, 2) {
        return Err(Error::ShapeMismatch("qubit Hamiltonian must be 2x2".into()));
    }
    h.require_finite()?;
    let deviation = h.hermitian_deviation();
    if deviation > tol.hermitian {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(Superoperator::from_map(|rho| commutator(h, rho)))
}

/// Rotating-frame qubit Hamiltonian (detuning / 2) sigma_z.
pub fn qubit_hamiltonian(detuning: f64) -> CMatrix {
    sigma_z().scale_real(0.5 * detuning)
}

/// exp(-(iH^ + R^) t).
pub fn propagator(relaxation: &Superoperator, hamiltonian: &Superoperator, t: f64) -> Result<Superoperator> {
    let g = generator(relaxation, hamiltonian);
    Superoperator::new(matrix_exp(&g.scale_real(t))?)
}

/// -(iH^ + R^).
pub fn generator(relaxation: &Superoperator, hamiltonian: &Superoperator) -> CMatrix {
    (&hamiltonian.0.scale(c(0.0, 1.0)) + &relaxation.0).scale_real(-1.0)
}

/// NV ground-triplet parameters; frequencies in MHz, field in Gauss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NVParams {
    pub zero_field_splitting: f64,
    pub transverse_splitting: f64,
    pub gyromagnetic: f64,
    pub bz: f64,
}

impl Default for NVParams {
    fn default() -> Self {
        Self {
            zero_field_splitting: 2880.0,
            transverse_splitting: 0.0,
            gyromagnetic: 2.8025,
            bz: 0.0,
        }
    }
}

/// Triplet Hamiltonian g_beta Bz Sz + D (Sz^2 - 2/3) in MHz over m_s = (+1, 0, -1),
/// and the m_s = 0 -> +1 transition frequency D + g_beta Bz.
pub fn nv_hamiltonian(p: &NVParams) -> Result<(CMatrix, f64)> {
    if !(p.zero_field_splitting > 0.0 && p.gyromagnetic > 0.0 && p.bz.is_finite()) {
        return Err(Error::InvalidArgument("D and g_beta must be positive".into()));
    }
    if p.transverse_splitting != 0.0 {
        return Err(Error::InvalidArgument("only the axially symmetric case E = 0 is modelled".into()));
    }
    let sz = [1.0, 0.0, -1.0];
    let diag: Vec<f64> = sz
        .iter()
        .map(|m| p.gyromagnetic * p.bz * m + p.zero_field_splitting * (m * m - 2.0 / 3.0))
        .collect();
    Ok((CMatrix::from_real_diag(&diag), diag[0] - diag[1]))
}

/// P^ with columns vec(E(e_k)), from the outputs of the canonical inputs.
pub fn propagator_from_outputs(outputs: &[CMatrix; 4]) -> Result<Superoperator> {
    if outputs.iter().any(|o| o.shape() != (2, 2)) {
        return Err(Error::ShapeMismatch("outputs must be 2x2".into()));
    }
    let img = matrix_unit_images(outputs);
    let cols: Vec<Vec<C64>> = [&img[0][0], &img[1][0], &img[0][1], &img[1][1]]
        .iter()
        .map(|m| vectorize(m).expect("2x2"))
        .collect();
    Superoperator::new(CMatrix::from_columns(&cols))
}

/// R^ = -iH^ - log(P^) / t.
pub fn generator_log_estimate(p: &Superoperator, h: &Superoperator, t: f64) -> Result<Superoperator> {
    generator_log_estimate_with(p, h, t, &Tolerances::default())
}

pub fn generator_log_estimate_with(
    p: &Superoperator,
    h: &Superoperator,
    t: f64,
    tol: &Tolerances,
) -> Result<Superoperator> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be positive, got {t}")));
    }
    let log = matrix_log_principal_with(&p.0, tol)?;
    Superoperator::new(&h.0.scale(c(0.0, -1.0)) - &log.scale_real(1.0 / t))
}

/// R^_RE = -dF/dt(0) with F(t) = exp(itH^/2) P^(t) exp(itH^/2), the
/// derivative taken by Richardson extrapolation over t1, 2t1, 4t1.
pub fn generator_bch_estimate(
    propagators: &[Superoperator],
    h: &Superoperator,
    schedule: &TimeSchedule,
) -> Result<Superoperator> {
    if schedule.count() != 3 || propagators.len() != 3 {
        return Err(Error::Schedule(format!(
            "extrapolation needs three propagators on t1, 2t1, 4t1; got {} on {} times",
            propagators.len(),
            schedule.count()
        )));
    }
    let samples: Vec<CMatrix> = propagators
        .iter()
        .zip(schedule.times())
        .map(|(p, t)| {
            let half = matrix_exp(&h.0.scale(c(0.0, 0.5 * t)))?;
            Ok(&(&half * &p.0) * &half)
        })
        .collect::<Result<_>>()?;
    let d = richardson_derivative(&samples, &CMatrix::identity(4), schedule.t1())?;
    Superoperator::new(d.scale_real(-1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorFitOptions {
    pub simplex: SimplexOptions,
}

impl Default for GeneratorFitOptions {
    fn default() -> Self {
        Self {
            simplex: SimplexOptions {
                f_tol: 1e-15,
                x_tol: 1e-10,
                max_evaluations: 40_000,
                restarts: 2,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorFit {
    pub a: GKSMatrix,
    pub params: GKSParams,
    pub relaxation: Superoperator,
    pub residual: f64,
    pub start_residual: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// sum_m ||exp(-(iH^ + R^(x)) t_m) - P^_m||_F^2
pub fn fit_objective(
    x: &GKSParams,
    propagators: &[Superoperator],
    h: &Superoperator,
    schedule: &TimeSchedule,
) -> Result<f64> {
    if propagators.len() != schedule.count() {
        return Err(Error::Schedule("one propagator per scheduled time required".into()));
    }
    let r = dissipator_superop(&gks_matrix(x));
    let g = generator(&r, h);
    let mut p = matrix_exp(&g.scale_real(schedule.t1()))?;
    let mut total = 0.0;
    for (m, measured) in propagators.iter().enumerate() {
        if m > 0 {
            // doubling grid: P(2t) = P(t)^2
            p = &p * &p;
        }
        let d = (&p - &measured.0).frobenius_norm();
        total += d * d;
    }
    Ok(total)
}

pub fn fit_generator(
    propagators: &[Superoperator],
    h: &Superoperator,
    schedule: &TimeSchedule,
    x0: &GKSParams,
    opts: &GeneratorFitOptions,
) -> Result<GeneratorFit> {
    let start_residual = fit_objective(x0, propagators, h, schedule)?;
    let found = nelder_mead(
        |x| {
            let mut p = [0.0; 9];
            p.copy_from_slice(x);
            fit_objective(&GKSParams(p), propagators, h, schedule).unwrap_or(f64::NAN)
        },
        &x0.0,
        &opts.simplex,
    )?;
    let mut p = [0.0; 9];
    p.copy_from_slice(&found.x);
    let params = GKSParams(p);
    let a = gks_matrix(&params);
    Ok(GeneratorFit {
        relaxation: dissipator_superop(&a),
        a,
        params,
        residual: found.f,
        start_residual,
        evaluations: found.evaluations,
        converged: found.converged,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GKSStart {
    pub params: GKSParams,
    /// Least-squares coefficients before eigenvalue clipping.
    pub raw: GKSMatrix,
    /// ||R^(raw) - R^_RE||_F: the part of the estimate outside the GKS form.
    pub residual: f64,
}

/// Hermitian 3x3 matrix from nine reals: diagonal, then (re, im) of the
/// (0,1), (1,2), (0,2) entries.
fn hermitian_from_reals(p: &[f64]) -> CMatrix {
    let mut a = CMatrix::zeros(3, 3);
    for i in 0..3 {
        a[(i, i)] = cr(p[i]);
    }
    for (k, &(i, j)) in [(0, 1), (1, 2), (0, 2)].iter().enumerate() {
        let z = c(p[3 + 2 * k], p[4 + 2 * k]);
        a[(i, j)] = z;
        a[(j, i)] = z.conj();
    }
    a
}

/// Least-squares projection of a relaxation estimate onto the GKS form,
/// clipped to PSD and factored into a start point.
pub fn gks_start_from_generator(r: &Superoperator) -> Result<GKSStart> {
    gks_start_from_generator_with(r, &Tolerances::default())
}

pub fn gks_start_from_generator_with(r: &Superoperator, tol: &Tolerances) -> Result<GKSStart> {
    // real 32x9 map from Hermitian parameters to stacked (re, im) of R^
    let mut design = CMatrix::zeros(32, 9);
    for q in 0..9 {
        let mut p = [0.0; 9];
        p[q] = 1.0;
        let image = dissipator_superop(&GKSMatrix(hermitian_from_reals(&p)));
        for (k, z) in image.0.as_slice().iter().enumerate() {
            design[(k, q)] = cr(z.re);
            design[(16 + k, q)] = cr(z.im);
        }
    }
    let target: Vec<C64> = r
        .0
        .as_slice()
        .iter()
        .map(|z| cr(z.re))
        .chain(r.0.as_slice().iter().map(|z| cr(z.im)))
        .collect();
    let p: Vec<f64> = pseudoinverse(&design)?.apply(&target).iter().map(|z| z.re).collect();
    let raw = GKSMatrix(hermitian_from_reals(&p));
    let residual = (&dissipator_superop(&raw).0 - &r.0).frobenius_norm();
    let clipped = GKSMatrix(eig_hermitian(&raw.0)?.reconstruct_with(|x| x.max(0.0)).hermitian_part());
    Ok(GKSStart { params: GKSParams::from_gks(&clipped, tol)?, raw, residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladSet {
    ops: Vec<CMatrix>,
    contributions: Vec<f64>,
}

impl LindbladSet {
    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// Fractions summing to one, aligned with `ops`.
    pub fn contributions(&self) -> &[f64] {
        &self.contributions
    }

    pub fn dissipator(&self) -> Superoperator {
        dissipator_from_lindblads(&self.ops)
    }
}

/// |L_i|_F^2 / sum_j |L_j|_F^2; all zeros when every operator vanishes.
pub fn relative_contributions(ops: &[CMatrix]) -> Vec<f64> {
    let w: Vec<f64> = ops.iter().map(|l| l.frobenius_norm().powi(2)).collect();
    let total: f64 = w.iter().sum();
    if total == 0.0 {
        return vec![0.0; ops.len()];
    }
    w.iter().map(|x| x / total).collect()
}

pub fn lindblads_from_gks(a: &GKSMatrix) -> Result<LindbladSet> {
    lindblads_from_gks_with(a, &Tolerances::default())
}

/// L_i = sqrt(d_i) sum_j U_ji F_j over a = U diag(d) U^dag, largest first;
/// operators with d_i below `lindblad_drop * max(d)` are dropped.
pub fn lindblads_from_gks_with(a: &GKSMatrix, tol: &Tolerances) -> Result<LindbladSet> {
    let eig = eig_hermitian(&a.0)?;
    if eig.min() < -tol.gks_negative {
        return Err(Error::NotPositiveSemidefinite { pivot: eig.min() });
    }
    let f = gks_basis();
    let dmax = eig.max().max(0.0);
    let mut ops = Vec::new();
    for i in (0..3).rev() {
        let d = eig.eigenvalues[i];
        if d <= 0.0 || d < tol.lindblad_drop * dmax {
            continue;
        }
        let w = d.sqrt();
        ops.push((0..3).fold(CMatrix::zeros(2, 2), |acc, j| &acc + &f[j].scale(eig.eigenvectors[(j, i)] * w)));
    }
    let contributions = relative_contributions(&ops);
    Ok(LindbladSet { ops, contributions })
}

/// Pauli expectations of exp(-(iH^ + R^) t) rho0 at each time; at t = 0 the
/// input's own expectations.
pub fn predict_expectations(
    relaxation: &Superoperator,
    hamiltonian: &Superoperator,
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<Vec<PauliExpectations>> {
    let v0 = vectorize(rho0.matrix())?;
    let g = generator(relaxation, hamiltonian);
    times
        .iter()
        .map(|&t| {
            let p = matrix_exp(&g.scale_real(t))?;
            let rho = devectorize(&p.apply(&v0))?;
            Ok(PauliExpectations::from_bloch(bloch_components(&rho)))
        })
        .collect()
}
