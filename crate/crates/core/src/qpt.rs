//! Standard process tomography for one qubit.
//!
//! A channel is written E(rho) = sum_mn chi_mn A_m rho A_n^dag over a fixed
//! operator basis {A_m}. The default basis is the normal basis of matrix
//! units, A_(2i+j) = |i><j| (zero-based), in which chi equals the Choi matrix
//! C = sum_ij E(|i><j|) (x) |i><j| with C[(2a+i), (2c+j)] = <a|E(|i><j|)|c>.
//!
//! Reconstruction follows the tensor route: beta maps chi to the outputs of
//! the four physical input states expanded in matrix units (lambda), and chi
//! is recovered with the pseudoinverse of beta.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{c, cr, eig_hermitian, inverse, paulis, pseudoinverse, singular_values, CMatrix};
use crate::qstate::{bloch_components, bloch_matrix, BlochVector, DensityMatrix};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Normal,
    Pauli,
    Custom,
}

/// Four linearly independent 2x2 operators.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBasis {
    kind: BasisKind,
    ops: [CMatrix; 4],
}

impl OperatorBasis {
    pub fn normal() -> Self {
        let unit = |i: usize, j: usize| crate::numkit::matrix_unit(2, i, j);
        Self {
            kind: BasisKind::Normal,
            ops: [unit(0, 0), unit(0, 1), unit(1, 0), unit(1, 1)],
        }
    }

    /// {I, sigma_x, sigma_y, sigma_z}.
    pub fn pauli() -> Self {
        let [x, y, z] = paulis();
        Self {
            kind: BasisKind::Pauli,
            ops: [CMatrix::identity(2), x, y, z],
        }
    }

    pub fn custom(ops: [CMatrix; 4]) -> Result<Self> {
        if ops.iter().any(|a| a.shape() != (2, 2)) {
            return Err(Error::ShapeMismatch("basis operators must be 2x2".into()));
        }
        let basis = Self { kind: BasisKind::Custom, ops };
        if inverse(&basis.vectorized()).is_none() {
            return Err(Error::SingularBasis);
        }
        Ok(basis)
    }

    pub fn of_kind(kind: BasisKind) -> Result<Self> {
        match kind {
            BasisKind::Normal => Ok(Self::normal()),
            BasisKind::Pauli => Ok(Self::pauli()),
            BasisKind::Custom => Err(Error::InvalidArgument("custom basis needs explicit operators".into())),
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn ops(&self) -> &[CMatrix; 4] {
        &self.ops
    }

    /// Gram matrix G_mn = tr(A_m^dag A_n).
    pub fn gram(&self) -> CMatrix {
        CMatrix::from_fn(4, 4, |m, n| (&self.ops[m].adjoint() * &self.ops[n]).trace())
    }

    /// Column m holds the entries of A_m in row-major order.
    fn vectorized(&self) -> CMatrix {
        CMatrix::from_fn(4, 4, |k, m| self.ops[m][(k / 2, k % 2)])
    }
}

/// Process matrix over a tagged basis. Hermitian, not necessarily positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiMatrix {
    matrix: CMatrix,
    basis: OperatorBasis,
}

impl ChiMatrix {
    pub fn new(matrix: CMatrix, basis: OperatorBasis) -> Result<Self> {
        Self::new_with(matrix, basis, &Tolerances::default())
    }

    pub fn new_with(matrix: CMatrix, basis: OperatorBasis, tol: &Tolerances) -> Result<Self> {
        if matrix.shape() != (4, 4) {
            return Err(Error::ShapeMismatch(format!("chi must be 4x4, got {:?}", matrix.shape())));
        }
        matrix.require_finite()?;
        let deviation = matrix.hermitian_deviation();
        if deviation > tol.hermitian {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { matrix, basis })
    }

    pub fn normal(matrix: CMatrix) -> Result<Self> {
        Self::new(matrix, OperatorBasis::normal())
    }

    /// Skips the Hermiticity check; for matrices Hermitian by construction.
    pub(crate) fn from_parts(matrix: CMatrix, basis: OperatorBasis) -> Self {
        debug_assert_eq!(matrix.shape(), (4, 4));
        Self { matrix, basis }
    }

    pub fn identity_process() -> Self {
        let mut m = CMatrix::zeros(4, 4);
        for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[(i, j)] = cr(1.0);
        }
        Self::from_parts(m, OperatorBasis::normal())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> &OperatorBasis {
        &self.basis
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eig_hermitian(&self.matrix).expect("finite 4x4").eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Re-expresses chi over `target`: with A_m = sum_k C_km B_k,
    /// chi_B = C chi_A C^dag.
    pub fn to_basis(&self, target: &OperatorBasis) -> Result<ChiMatrix> {
        let vb_inv = inverse(&target.vectorized()).ok_or(Error::SingularBasis)?;
        let change = &vb_inv * &self.basis.vectorized();
        let m = &(&change * &self.matrix) * &change.adjoint();
        Ok(Self::from_parts(m, target.clone()))
    }

    pub fn to_normal(&self) -> Result<ChiMatrix> {
        if self.basis.kind == BasisKind::Normal {
            return Ok(self.clone());
        }
        self.to_basis(&OperatorBasis::normal())
    }

    fn require_normal(&self) -> Result<()> {
        if self.basis.kind == BasisKind::Normal {
            Ok(())
        } else {
            Err(Error::NonNormalBasis)
        }
    }
}

/// The canonical inputs |0>, |1>, (|0>+|1>)/sqrt2, (|0>+i|1>)/sqrt2.
#[derive(Debug, Clone, PartialEq)]
pub struct InputStateSet {
    states: [DensityMatrix; 4],
}

impl InputStateSet {
    pub const LABELS: [&'static str; 4] = ["z+", "z-", "x+", "y+"];

    pub fn canonical() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let pure = |a: C64, b: C64| DensityMatrix::pure([a, b]).expect("unit vector");
        Self {
            states: [
                pure(cr(1.0), cr(0.0)),
                pure(cr(0.0), cr(1.0)),
                pure(cr(s), cr(s)),
                pure(cr(s), c(0.0, s)),
            ],
        }
    }

    pub fn from_states(states: [DensityMatrix; 4]) -> Self {
        Self { states }
    }

    pub fn states(&self) -> &[DensityMatrix; 4] {
        &self.states
    }

    pub fn bloch_vectors() -> [BlochVector; 4] {
        [
            BlochVector::new(0.0, 0.0, 1.0),
            BlochVector::new(0.0, 0.0, -1.0),
            BlochVector::new(1.0, 0.0, 0.0),
            BlochVector::new(0.0, 1.0, 0.0),
        ]
    }
}

/// beta[(4j+k), (4m+n)] is the coefficient of the k-th matrix unit in
/// A_m rho_j A_n^dag.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaTensor {
    matrix: CMatrix,
    basis: OperatorBasis,
}

impl BetaTensor {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> &OperatorBasis {
        &self.basis
    }

    pub fn condition_number(&self) -> f64 {
        let s = singular_values(&self.matrix).expect("finite beta");
        s[0] / s[s.len() - 1]
    }
}

pub fn build_beta(basis: &OperatorBasis, states: &InputStateSet) -> BetaTensor {
    let mut beta = CMatrix::zeros(16, 16);
    for (j, rho) in states.states.iter().enumerate() {
        for m in 0..4 {
            let left = &basis.ops[m] * rho.matrix();
            for n in 0..4 {
                let image = &left * &basis.ops[n].adjoint();
                for k in 0..4 {
                    beta[(4 * j + k, 4 * m + n)] = image[(k / 2, k % 2)];
                }
            }
        }
    }
    BetaTensor { matrix: beta, basis: basis.clone() }
}

/// lambda[j][k]: coefficient of the k-th matrix unit in E(rho_j).
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaMatrix(CMatrix);

impl LambdaMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }
}

pub fn lambda_from_outputs(outputs: &[CMatrix; 4]) -> Result<LambdaMatrix> {
    if outputs.iter().any(|o| o.shape() != (2, 2)) {
        return Err(Error::ShapeMismatch("outputs must be 2x2".into()));
    }
    Ok(LambdaMatrix(CMatrix::from_fn(4, 4, |j, k| outputs[j][(k / 2, k % 2)])))
}

pub fn lambda_from_states(outputs: &[DensityMatrix; 4]) -> LambdaMatrix {
    let m = outputs.clone().map(DensityMatrix::into_matrix);
    lambda_from_outputs(&m).expect("2x2 states")
}

/// chi = reshape(beta^+ vec(lambda)), chi[m][n] = x[4m+n].
pub fn chi_from_lambda(lambda: &LambdaMatrix, beta: &BetaTensor) -> ChiMatrix {
    let pinv = pseudoinverse(&beta.matrix).expect("finite beta");
    let x = pinv.apply(lambda.0.as_slice());
    let m = CMatrix::from_fn(4, 4, |i, j| x[4 * i + j]);
    ChiMatrix::from_parts(m, beta.basis.clone())
}

/// Full linear-inversion route from the outputs of the canonical inputs.
pub fn chi_from_outputs(outputs: &[CMatrix; 4]) -> Result<ChiMatrix> {
    let beta = build_beta(&OperatorBasis::normal(), &InputStateSet::canonical());
    Ok(chi_from_lambda(&lambda_from_outputs(outputs)?, &beta))
}

/// Literal evaluation of sum_mn chi_mn A_m rho A_n^dag.
pub fn apply_chi(chi: &ChiMatrix, rho: &CMatrix) -> CMatrix {
    let ops = &chi.basis.ops;
    let mut out = CMatrix::zeros(2, 2);
    for m in 0..4 {
        let left = &ops[m] * rho;
        for n in 0..4 {
            let w = chi.matrix[(m, n)];
            if w == cr(0.0) {
                continue;
            }
            out = &out + &(&left * &ops[n].adjoint()).scale(w);
        }
    }
    out
}

/// Images E(|i><j|) indexed [i][j], from the outputs of the canonical inputs
/// via E(|0><1|) = E(x+) + i E(y+) - (1+i)/2 (E(z+) + E(z-)) and its
/// conjugate counterpart.
pub fn matrix_unit_images(outputs: &[CMatrix; 4]) -> [[CMatrix; 2]; 2] {
    let [e0, e1, ex, ey] = outputs;
    let pops = e0 + e1;
    let up = &(ex + &ey.scale(c(0.0, 1.0))) - &pops.scale(c(0.5, 0.5));
    let down = &(ex - &ey.scale(c(0.0, 1.0))) - &pops.scale(c(0.5, -0.5));
    [[e0.clone(), up], [down, e1.clone()]]
}

/// Linear combination of Kraus-like operators with weights absorbed.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    ops: Vec<CMatrix>,
}

impl KrausSet {
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        if ops.iter().any(|k| k.shape() != (2, 2)) {
            return Err(Error::ShapeMismatch("Kraus operators must be 2x2".into()));
        }
        Ok(Self { ops })
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        self.ops
            .iter()
            .fold(CMatrix::zeros(2, 2), |acc, k| &acc + &(&(k * rho) * &k.adjoint()))
    }

    /// ||sum E_i^dag E_i - I||_F.
    pub fn completeness_defect(&self) -> f64 {
        let s = self
            .ops
            .iter()
            .fold(CMatrix::zeros(2, 2), |acc, k| &acc + &(&k.adjoint() * k));
        (&s - &CMatrix::identity(2)).frobenius_norm()
    }
}

pub fn kraus_from_chi(chi: &ChiMatrix) -> Result<KrausSet> {
    kraus_from_chi_with(chi, &Tolerances::default())
}

/// E_i = sqrt(d_i) sum_j U_ji A_j over the eigen-decomposition chi = U d U^dag.
pub fn kraus_from_chi_with(chi: &ChiMatrix, tol: &Tolerances) -> Result<KrausSet> {
    let eig = eig_hermitian(&chi.matrix)?;
    if eig.min() < -tol.kraus_negative {
        return Err(Error::NotCompletelyPositive { min_eigenvalue: eig.min() });
    }
    let mut ops = Vec::new();
    for (i, &d) in eig.eigenvalues.iter().enumerate() {
        if d <= 0.0 {
            continue;
        }
        let w = d.sqrt();
        let k = (0..4).fold(CMatrix::zeros(2, 2), |acc, j| {
            &acc + &chi.basis.ops[j].scale(eig.eigenvectors[(j, i)] * w)
        });
        ops.push(k);
    }
    Ok(KrausSet { ops })
}

/// Real 4x4 action on (1, r): row 0 is (1, 0, 0, 0), rows 1..4 are (t_i, E_i.).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    rows: [[f64; 4]; 4],
}

impl AffineMap {
    pub fn new(rows: [[f64; 4]; 4]) -> Result<Self> {
        if rows[0] != [1.0, 0.0, 0.0, 0.0] {
            return Err(Error::MalformedAffine);
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows })
    }

    pub fn from_parts(e: [[f64; 3]; 3], t: [f64; 3]) -> Result<Self> {
        let mut rows = [[0.0; 4]; 4];
        rows[0][0] = 1.0;
        for i in 0..3 {
            rows[i + 1][0] = t[i];
            rows[i + 1][1..].copy_from_slice(&e[i]);
        }
        Self::new(rows)
    }

    pub fn identity() -> Self {
        Self::from_parts([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], [0.0; 3])
            .expect("identity is well formed")
    }

    pub fn rows(&self) -> &[[f64; 4]; 4] {
        &self.rows
    }

    pub fn e(&self) -> [[f64; 3]; 3] {
        let mut e = [[0.0; 3]; 3];
        for i in 0..3 {
            e[i].copy_from_slice(&self.rows[i + 1][1..]);
        }
        e
    }

    pub fn t(&self) -> [f64; 3] {
        [self.rows[1][0], self.rows[2][0], self.rows[3][0]]
    }

    /// E r + t; the result may leave the unit ball.
    pub fn apply(&self, r: [f64; 3]) -> [f64; 3] {
        let mut out = self.t();
        for (i, o) in out.iter_mut().enumerate() {
            for k in 0..3 {
                *o += self.rows[i + 1][k + 1] * r[k];
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &AffineMap) -> f64 {
        self.rows
            .iter()
            .flatten()
            .zip(other.rows.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Images of the canonical inputs, as 2x2 matrices (I + r'.sigma)/2.
    pub fn canonical_outputs(&self) -> [CMatrix; 4] {
        InputStateSet::bloch_vectors().map(|r| bloch_matrix(BlochVector::from_array(self.apply(r.as_array()))))
    }
}

/// t_k = tr(E(I) sigma_k)/2 and E_kl = tr(E(sigma_l) sigma_k)/2; the first
/// row is fixed to (1, 0, 0, 0) regardless of any trace defect.
pub fn chi_to_affine(chi: &ChiMatrix) -> AffineMap {
    let sig = paulis();
    let at_identity = apply_chi(chi, &CMatrix::identity(2));
    let t = bloch_components(&at_identity).scaled(0.5).as_array();
    let mut e = [[0.0; 3]; 3];
    for l in 0..3 {
        let col = bloch_components(&apply_chi(chi, &sig[l])).scaled(0.5).as_array();
        for k in 0..3 {
            e[k][l] = col[k];
        }
    }
    AffineMap::from_parts(e, t).expect("chi images are finite")
}

/// Normal-basis chi (= Choi matrix) of the trace-preserving map with the
/// given affine action.
pub fn affine_to_chi(map: &AffineMap) -> ChiMatrix {
    let sig = paulis();
    let id = CMatrix::identity(2);
    let e = map.e();
    let t = map.t();
    let image_i = (0..3).fold(id.clone(), |acc, k| &acc + &sig[k].scale_real(t[k]));
    let image_sigma: Vec<CMatrix> = (0..3)
        .map(|l| (0..3).fold(CMatrix::zeros(2, 2), |acc, k| &acc + &sig[k].scale_real(e[k][l])))
        .collect();
    let half = |m: &CMatrix| m.scale_real(0.5);
    let i_unit = c(0.0, 1.0);
    let images = [
        [
            half(&(&image_i + &image_sigma[2])),
            half(&(&image_sigma[0] + &image_sigma[1].scale(i_unit))),
        ],
        [
            half(&(&image_sigma[0] - &image_sigma[1].scale(i_unit))),
            half(&(&image_i - &image_sigma[2])),
        ],
    ];
    chi_from_unit_images(&images)
}

/// chi[(2a+i), (2c+j)] = <a|E(|i><j|)|c>.
pub fn chi_from_unit_images(images: &[[CMatrix; 2]; 2]) -> ChiMatrix {
    let m = CMatrix::from_fn(4, 4, |r, s| images[r % 2][s % 2][(r / 2, s / 2)]);
    ChiMatrix::from_parts(m, OperatorBasis::normal())
}

pub fn chi_to_choi(chi: &ChiMatrix) -> Result<CMatrix> {
    chi.require_normal()?;
    Ok(chi.matrix.clone())
}

/// Choi matrix over the dimension: the state obtained by sending half of a
/// maximally entangled pair through the channel. Unit trace iff TP.
pub fn jamiolkowski_state(chi: &ChiMatrix) -> Result<CMatrix> {
    Ok(chi_to_choi(chi)?.scale_real(0.5))
}

/// ||sum_mn chi_mn A_n^dag A_m - I||_F.
pub fn tp_defect(chi: &ChiMatrix) -> f64 {
    (&tp_operator(chi) - &CMatrix::identity(2)).frobenius_norm()
}

pub(crate) fn tp_operator(chi: &ChiMatrix) -> CMatrix {
    let ops = &chi.basis.ops;
    let mut s = CMatrix::zeros(2, 2);
    for m in 0..4 {
        for n in 0..4 {
            let w = chi.matrix[(m, n)];
            if w != cr(0.0) {
                s = &s + &(&ops[n].adjoint() * &ops[m]).scale(w);
            }
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnphysicalityNorms {
    /// Maximum absolute column sum.
    pub p1: f64,
    /// Largest singular value.
    pub p2: f64,
    pub fro: f64,
    /// Half the trace norm.
    pub d_pro: f64,
}

pub fn unphysicality_norms(chi: &ChiMatrix, chi_tilde: &ChiMatrix) -> Result<UnphysicalityNorms> {
    if chi.basis != chi_tilde.basis {
        return Err(Error::InvalidArgument("process matrices are over different bases".into()));
    }
    let x = &chi.matrix - &chi_tilde.matrix;
    let s = singular_values(&x)?;
    Ok(UnphysicalityNorms {
        p1: x.norm_one(),
        p2: s[0],
        fro: x.frobenius_norm(),
        d_pro: 0.5 * s.iter().sum::<f64>(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidPoint {
    pub input: [f64; 3],
    pub output: [f64; 3],
    /// Output outside the Bloch ball.
    pub violation: bool,
}

/// Deterministic Fibonacci-spiral points on the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

pub fn ellipsoid_samples(map: &AffineMap, n: usize) -> Result<Vec<EllipsoidPoint>> {
    ellipsoid_samples_with(map, n, &Tolerances::default())
}

pub fn ellipsoid_samples_with(map: &AffineMap, n: usize, tol: &Tolerances) -> Result<Vec<EllipsoidPoint>> {
    if n == 0 {
        return Err(Error::InvalidArgument("point count must be at least 1".into()));
    }
    Ok(fibonacci_sphere(n)
        .into_iter()
        .map(|input| {
            let output = map.apply(input);
            let norm = output.iter().map(|v| v * v).sum::<f64>().sqrt();
            EllipsoidPoint { input, output, violation: norm > 1.0 + tol.protrusion }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical_matrices() -> [CMatrix; 4] {
        InputStateSet::canonical().states().clone().map(DensityMatrix::into_matrix)
    }

    #[test]
    fn beta_first_entry_is_unit() {
        let beta = build_beta(&OperatorBasis::normal(), &InputStateSet::canonical());
        // A_0 rho_0 A_0^dag = |0><0|
        for k in 0..4 {
            let expected = if k == 0 { 1.0 } else { 0.0 };
            assert_eq!(beta.matrix()[(k, 0)], cr(expected));
        }
        assert!(beta.condition_number().is_finite());
    }

    #[test]
    fn identity_process_round_trip() {
        let chi = chi_from_outputs(&canonical_matrices()).unwrap();
        assert!(chi.matrix().max_abs_diff(ChiMatrix::identity_process().matrix()) < 1e-12);
        assert!(tp_defect(&chi) < 1e-12);
        assert!(chi_to_affine(&chi).max_abs_diff(&AffineMap::identity()) < 1e-12);
    }

    #[test]
    fn zero_lambda_gives_zero_chi() {
        let zero = CMatrix::zeros(2, 2);
        let chi = chi_from_outputs(&[zero.clone(), zero.clone(), zero.clone(), zero]).unwrap();
        assert_eq!(chi.matrix().max_abs(), 0.0);
    }

    #[test]
    fn bit_flip_on_ground_state() {
        let x = crate::numkit::sigma_x();
        let outs = canonical_matrices().map(|r| &(&x * &r) * &x);
        let chi = chi_from_outputs(&outs).unwrap();
        let out = apply_chi(&chi, &CMatrix::from_real_diag(&[1.0, 0.0]));
        assert!(out.max_abs_diff(&CMatrix::from_real_diag(&[0.0, 1.0])) < 1e-12);
    }

    #[test]
    fn unit_images_identity() {
        let images = matrix_unit_images(&canonical_matrices());
        for i in 0..2 {
            for j in 0..2 {
                let unit = crate::numkit::matrix_unit(2, i, j);
                assert!(images[i][j].max_abs_diff(&unit) < 1e-15);
            }
        }
    }

    #[test]
    fn tp_defect_of_scaled_identity() {
        let chi = ChiMatrix::from_parts(ChiMatrix::identity_process().matrix().scale_real(0.9), OperatorBasis::normal());
        assert!((tp_defect(&chi) - 0.1 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn norms_of_diagonal_difference() {
        let a = ChiMatrix::normal(CMatrix::from_real_diag(&[0.1, -0.1, 0.0, 0.0])).unwrap();
        let b = ChiMatrix::normal(CMatrix::zeros(4, 4)).unwrap();
        let n = unphysicality_norms(&a, &b).unwrap();
        assert!((n.p1 - 0.1).abs() < 1e-12);
        assert!((n.p2 - 0.1).abs() < 1e-12);
        assert!((n.fro - 0.1 * 2f64.sqrt()).abs() < 1e-12);
        assert!((n.d_pro - 0.1).abs() < 1e-12);
    }

    #[test]
    fn pauli_basis_identity() {
        let chi = ChiMatrix::identity_process().to_basis(&OperatorBasis::pauli()).unwrap();
        let expected = CMatrix::from_real_diag(&[1.0, 0.0, 0.0, 0.0]);
        assert!(chi.matrix().max_abs_diff(&expected) < 1e-12);
        let back = chi.to_normal().unwrap();
        assert!(back.matrix().max_abs_diff(ChiMatrix::identity_process().matrix()) < 1e-12);
        assert_eq!(chi_to_choi(&chi), Err(Error::NonNormalBasis));
    }

    #[test]
    fn affine_rejects_bad_first_row() {
        let mut rows = *AffineMap::identity().rows();
        rows[0][1] = 1e-3;
        assert_eq!(AffineMap::new(rows), Err(Error::MalformedAffine));
    }

    #[test]
    fn ellipsoid_identity_and_inflated() {
        let pts = ellipsoid_samples(&AffineMap::identity(), 3).unwrap();
        for p in &pts {
            assert_eq!(p.input, p.output);
            assert!(!p.violation);
        }
        let big = AffineMap::from_parts([[1.2, 0.0, 0.0], [0.0, 1.2, 0.0], [0.0, 0.0, 1.2]], [0.0; 3]).unwrap();
        assert!(ellipsoid_samples(&big, 50).unwrap().iter().all(|p| p.violation));
        assert!(ellipsoid_samples(&big, 0).is_err());
    }

    #[test]
    fn singular_basis_rejected() {
        let id = CMatrix::identity(2);
        let r = OperatorBasis::custom([id.clone(), id.clone(), crate::numkit::sigma_x(), crate::numkit::sigma_z()]);
        assert_eq!(r, Err(Error::SingularBasis));
    }
}
