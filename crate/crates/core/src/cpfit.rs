//! Repair of an estimated process matrix to the nearest completely positive,
//! trace-preserving one.
//!
//! The candidate is parameterized as chi~ = T^dag T with T lower triangular,
//! so positivity holds for every parameter vector. Trace preservation enters
//! as a quadratic penalty. The search starts from the Cholesky factor of the
//! eigenvalue-clipped input.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{c, cholesky_lower_with, eig_hermitian, nelder_mead, CMatrix, SimplexOptions};
use crate::qpt::{tp_defect, ChiMatrix, OperatorBasis};
use crate::tolerances::Tolerances;

/// Real parameters of the lower-triangular factor T, laid out as
///
/// ```text
/// T = | t1           0            0            0  |
///     | t5 + i t6    t2           0            0  |
///     | t11 + i t12  t7 + i t8    t3           0  |
///     | t15 + i t16  t13 + i t14  t9 + i t10   t4 |
/// ```
///
/// (one-based names; stored zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CholeskyParams(pub [f64; 16]);

/// (row, col, index of real part) for the off-diagonal entries; the
/// imaginary part follows at index + 1.
const OFF_DIAGONAL: [(usize, usize, usize); 6] = [
    (1, 0, 4),
    (2, 1, 6),
    (3, 2, 8),
    (2, 0, 10),
    (3, 1, 12),
    (3, 0, 14),
];

impl CholeskyParams {
    pub fn factor(&self) -> CMatrix {
        let mut t = CMatrix::zeros(4, 4);
        for i in 0..4 {
            t[(i, i)] = c(self.0[i], 0.0);
        }
        for &(r, col, k) in &OFF_DIAGONAL {
            t[(r, col)] = c(self.0[k], self.0[k + 1]);
        }
        t
    }

    /// Inverse of `factor` on lower-triangular matrices; the imaginary parts
    /// of the diagonal are discarded.
    pub fn from_factor(t: &CMatrix) -> Self {
        let mut p = [0.0; 16];
        for (i, v) in p.iter_mut().take(4).enumerate() {
            *v = t[(i, i)].re;
        }
        for &(r, col, k) in &OFF_DIAGONAL {
            p[k] = t[(r, col)].re;
            p[k + 1] = t[(r, col)].im;
        }
        Self(p)
    }

    /// T^dag T, positive semidefinite for every parameter vector.
    pub fn chi(&self) -> CMatrix {
        let t = self.factor();
        &t.adjoint() * &t
    }
}

/// chi* = U max(D, 0) U^dag.
pub fn clip_negative_eigs(chi: &ChiMatrix) -> ChiMatrix {
    let eig = eig_hermitian(chi.matrix()).expect("finite chi");
    ChiMatrix::new(eig.reconstruct_with(|x| x.max(0.0)).hermitian_part(), chi.basis().clone())
        .expect("clipped matrix is Hermitian")
}

/// Parameters with T^dag T = chi*. With the reversal permutation P,
/// P chi* P = L L^dag (lower Cholesky) and T = P L^dag P is lower triangular.
pub fn initial_params(chi_star: &ChiMatrix) -> Result<CholeskyParams> {
    initial_params_with(chi_star, &Tolerances::default())
}

pub fn initial_params_with(chi_star: &ChiMatrix, tol: &Tolerances) -> Result<CholeskyParams> {
    let reversed = reverse(chi_star.matrix());
    let l = cholesky_lower_with(&reversed, tol.psd_pivot)?;
    Ok(CholeskyParams::from_factor(&reverse(&l.adjoint())))
}

fn reverse(m: &CMatrix) -> CMatrix {
    let n = m.rows();
    CMatrix::from_fn(n, n, |i, j| m[(n - 1 - i, n - 1 - j)])
}

/// Delta(t) = ||T^dag T - chi||_F^2 + lagrange ||sum chi~_mn A_n^dag A_m - I||_F^2
/// over the normal basis.
pub fn deviation(params: &CholeskyParams, chi: &ChiMatrix, lagrange: f64) -> Result<f64> {
    if chi.basis().kind() != crate::qpt::BasisKind::Normal {
        return Err(Error::NonNormalBasis);
    }
    let target = dense(chi.matrix());
    Ok(Objective { target, lagrange }.eval(&params.0))
}

fn dense(m: &CMatrix) -> [[C64; 4]; 4] {
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = m[(i, j)];
        }
    }
    out
}

/// Allocation-free evaluation of the deviation; the simplex calls it tens of
/// thousands of times.
struct Objective {
    target: [[C64; 4]; 4],
    lagrange: f64,
}

impl Objective {
    fn eval(&self, p: &[f64]) -> f64 {
        let mut t = [[C64::new(0.0, 0.0); 4]; 4];
        for (i, row) in t.iter_mut().enumerate() {
            row[i] = C64::new(p[i], 0.0);
        }
        for &(r, col, k) in &OFF_DIAGONAL {
            t[r][col] = C64::new(p[k], p[k + 1]);
        }
        // chi~[i][j] = sum_k conj(T[k][i]) T[k][j], k >= max(i, j)
        let mut chi = [[C64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut s = C64::new(0.0, 0.0);
                for row in t.iter().skip(i.max(j)) {
                    s += row[i].conj() * row[j];
                }
                chi[i][j] = s;
            }
        }
        let mut fit = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                fit += (chi[i][j] - self.target[i][j]).norm_sqr();
            }
        }
        // trace-preservation operator: M[j][i] = sum_a chi[(2a+i), (2a+j)]
        let mut penalty = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut m = chi[i][j] + chi[2 + i][2 + j];
                if i == j {
                    m -= 1.0;
                }
                penalty += m.norm_sqr();
            }
        }
        fit + self.lagrange * penalty
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectionOptions {
    pub lagrange: f64,
    pub simplex: SimplexOptions,
    /// Smallest acceptable eigenvalue of the result.
    pub min_eigenvalue: f64,
    /// Largest acceptable trace-preservation defect of the result.
    pub tp_defect_max: f64,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        Self::from_tolerances(&Tolerances::default())
    }
}

impl ProjectionOptions {
    pub fn from_tolerances(tol: &Tolerances) -> Self {
        Self {
            lagrange: 100.0,
            simplex: SimplexOptions {
                f_tol: 1e-12,
                x_tol: 1e-7,
                max_evaluations: 60_000,
                restarts: 2,
            },
            min_eigenvalue: tol.cp_min_eigenvalue,
            tp_defect_max: tol.tp_defect_max,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lagrange > 0.0 && self.lagrange.is_finite()) {
            return Err(Error::InvalidArgument(format!("lagrange multiplier {} must be positive", self.lagrange)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionDiagnostics {
    pub min_eigenvalue: f64,
    pub tp_defect: f64,
    /// ||chi - chi~||_F.
    pub distance_fro: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub chi_tilde: ChiMatrix,
    pub params: CholeskyParams,
    pub deviation: f64,
    pub start_deviation: f64,
    pub evaluations: usize,
    /// Eigenvalue-clipped input, the start point of the search.
    pub start: ChiMatrix,
    pub diagnostics: ProjectionDiagnostics,
    /// Both physicality thresholds met.
    pub success: bool,
}

/// clip -> Cholesky start -> simplex on the deviation. Inputs over other
/// bases are converted to the normal basis first and the result stays there.
pub fn project_to_cp(chi: &ChiMatrix, opts: &ProjectionOptions) -> Result<ProjectionResult> {
    opts.validate()?;
    let chi = chi.to_normal()?;
    let start = clip_negative_eigs(&chi);
    let p0 = initial_params(&start)?;
    let objective = Objective { target: dense(chi.matrix()), lagrange: opts.lagrange };
    let start_deviation = objective.eval(&p0.0);
    let found = nelder_mead(|x| objective.eval(x), &p0.0, &opts.simplex)?;

    let mut p = [0.0; 16];
    p.copy_from_slice(&found.x);
    let params = CholeskyParams(p);
    let chi_tilde = ChiMatrix::new(params.chi().hermitian_part(), OperatorBasis::normal())?;
    let min_eigenvalue = chi_tilde.min_eigenvalue();
    let defect = tp_defect(&chi_tilde);
    let diagnostics = ProjectionDiagnostics {
        min_eigenvalue,
        tp_defect: defect,
        distance_fro: (chi.matrix() - chi_tilde.matrix()).frobenius_norm(),
        converged: found.converged,
    };
    Ok(ProjectionResult {
        success: min_eigenvalue >= opts.min_eigenvalue && defect <= opts.tp_defect_max,
        chi_tilde,
        params,
        deviation: found.f,
        start_deviation,
        evaluations: found.evaluations,
        start,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::cr;

    #[test]
    fn clip_diagonal() {
        let chi = ChiMatrix::normal(CMatrix::from_real_diag(&[1.0, -0.1, 0.2, 0.0])).unwrap();
        let clipped = clip_negative_eigs(&chi);
        assert!(clipped.matrix().max_abs_diff(&CMatrix::from_real_diag(&[1.0, 0.0, 0.2, 0.0])) < 1e-12);
    }

    #[test]
    fn initial_params_of_diagonals() {
        let id = ChiMatrix::normal(CMatrix::identity(4)).unwrap();
        let p = initial_params(&id).unwrap();
        let mut expected = [0.0; 16];
        expected[..4].copy_from_slice(&[1.0; 4]);
        assert_eq!(p.0, expected);

        let d = ChiMatrix::normal(CMatrix::from_real_diag(&[4.0, 1.0, 1.0, 1.0])).unwrap();
        let p = initial_params(&d).unwrap();
        expected[0] = 2.0;
        assert_eq!(p.0, expected);
    }

    #[test]
    fn factor_round_trip() {
        let p = CholeskyParams(std::array::from_fn(|i| (i as f64 * 0.37).sin()));
        assert_eq!(CholeskyParams::from_factor(&p.factor()), p);
        let t = p.factor();
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert_eq!(t[(i, j)], cr(0.0));
            }
        }
    }

    #[test]
    fn deviation_at_zero() {
        let chi = ChiMatrix::identity_process();
        let d = deviation(&CholeskyParams([0.0; 16]), &chi, 3.0).unwrap();
        assert!((d - (4.0 + 2.0 * 3.0)).abs() < 1e-12);
    }

    #[test]
    fn physical_input_is_fixed_point() {
        let chi = ChiMatrix::identity_process();
        let r = project_to_cp(&chi, &ProjectionOptions::default()).unwrap();
        assert!(r.success);
        assert!(r.diagnostics.distance_fro < 1e-6);
        assert!(r.deviation <= r.start_deviation);
    }

    #[test]
    fn rejects_bad_lagrange() {
        let opts = ProjectionOptions { lagrange: 0.0, ..ProjectionOptions::default() };
        assert!(project_to_cp(&ChiMatrix::identity_process(), &opts).is_err());
    }
}
