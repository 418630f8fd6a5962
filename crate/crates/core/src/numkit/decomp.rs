use num_complex::Complex64 as C64;

use super::matrix::{cr, CMatrix};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// Lower-triangular L with real non-negative diagonal and L L^dag = M.
///
/// Pivots in `[-pivot_tol * scale, pivot_tol * scale]` are clamped to zero and
/// the corresponding column below the pivot is zeroed; more negative pivots
/// are reported as `NotPositiveSemidefinite`.
pub fn cholesky_lower(m: &CMatrix) -> Result<CMatrix> {
    cholesky_lower_with(m, Tolerances::default().psd_pivot)
}

pub fn cholesky_lower_with(m: &CMatrix, pivot_tol: f64) -> Result<CMatrix> {
    m.require_square()?;
    m.require_finite()?;
    let n = m.rows();
    let a = m.hermitian_part();
    let scale = (0..n).map(|i| a[(i, i)].re.abs()).fold(1.0, f64::max);
    let tol = pivot_tol * scale;
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let d = a[(j, j)].re - (0..j).map(|k| l[(j, k)].norm_sqr()).sum::<f64>();
        if d < -tol {
            return Err(Error::NotPositiveSemidefinite { pivot: d });
        }
        if d <= tol {
            continue;
        }
        let ljj = d.sqrt();
        l[(j, j)] = cr(ljj);
        for i in (j + 1)..n {
            let s: C64 = (0..j).map(|k| l[(i, k)] * l[(j, k)].conj()).sum();
            l[(i, j)] = (a[(i, j)] - s) / ljj;
        }
    }
    Ok(l)
}

/// Thin singular value decomposition `M = U diag(s) V^dag`, singular values
/// descending. For an m x n input, U is m x k, V is n x k with k = min(m, n).
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(m: &CMatrix) -> Result<Svd> {
    m.require_finite()?;
    if m.rows() < m.cols() {
        let t = svd(&m.adjoint())?;
        return Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    let (rows, cols) = m.shape();
    let mut u = m.clone();
    let mut v = CMatrix::identity(cols);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = cr(0.0);
                for i in 0..rows {
                    alpha += u[(i, p)].norm_sqr();
                    beta += u[(i, q)].norm_sqr();
                    gamma += u[(i, p)].conj() * u[(i, q)];
                }
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..rows {
                    let up = u[(i, p)];
                    let uq = u[(i, q)] * phase.conj();
                    u[(i, p)] = up * cs - uq * sn;
                    u[(i, q)] = up * sn + uq * cs;
                }
                for i in 0..cols {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)] * phase.conj();
                    v[(i, p)] = vp * cs - vq * sn;
                    v[(i, q)] = vp * sn + vq * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..cols)
        .map(|j| (0..rows).map(|i| u[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let u_sorted = CMatrix::from_fn(rows, cols, |i, k| {
        let j = order[k];
        if norms[j] > 0.0 {
            u[(i, j)] / norms[j]
        } else {
            cr(0.0)
        }
    });
    let v_sorted = CMatrix::from_fn(cols, cols, |i, k| v[(i, order[k])]);
    Ok(Svd {
        u: u_sorted,
        singular_values,
        v: v_sorted,
    })
}

pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(svd(m)?.singular_values)
}

/// Moore-Penrose pseudoinverse; singular values below `1e-10 * s_max` are
/// treated as zero.
pub fn pseudoinverse(m: &CMatrix) -> Result<CMatrix> {
    pseudoinverse_with(m, Tolerances::default().pinv_rcond)
}

pub fn pseudoinverse_with(m: &CMatrix, rcond: f64) -> Result<CMatrix> {
    let d = svd(m)?;
    let smax = d.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = rcond * smax;
    let k = d.singular_values.len();
    let mut out = CMatrix::zeros(m.cols(), m.rows());
    for idx in 0..k {
        let s = d.singular_values[idx];
        if s <= cutoff || s == 0.0 {
            continue;
        }
        for i in 0..m.cols() {
            let vi = d.v[(i, idx)] / s;
            for j in 0..m.rows() {
                out[(i, j)] += vi * d.u[(j, idx)].conj();
            }
        }
    }
    Ok(out)
}

/// Inverse by Gaussian elimination with partial pivoting; `None` when a
/// pivot vanishes.
pub fn inverse(m: &CMatrix) -> Option<CMatrix> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut inv = CMatrix::identity(n);
    let scale = m.max_abs();
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))?;
        let pivot = a[(pivot_row, col)];
        if pivot.norm() <= f64::EPSILON * 1e-3 * scale {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                let t = a[(col, j)];
                a[(col, j)] = a[(pivot_row, j)];
                a[(pivot_row, j)] = t;
                let t = inv[(col, j)];
                inv[(col, j)] = inv[(pivot_row, j)];
                inv[(pivot_row, j)] = t;
            }
        }
        let p_inv = cr(1.0) / pivot;
        for j in 0..n {
            a[(col, j)] *= p_inv;
            inv[(col, j)] *= p_inv;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = a[(i, col)];
            if f == cr(0.0) {
                continue;
            }
            for j in 0..n {
                let acj = a[(col, j)];
                let icj = inv[(col, j)];
                a[(i, j)] -= f * acj;
                inv[(i, j)] -= f * icj;
            }
        }
    }
    if inv.is_finite() {
        Some(inv)
    } else {
        None
    }
}

/// Solves A X = B; `None` when A is singular.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Option<CMatrix> {
    inverse(a).map(|inv| &inv * b)
}
