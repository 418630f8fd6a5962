//! Matrix exponential and principal logarithm.
//!
//! Both functions first try the spectral route `V f(D) V^-1`. When the
//! eigenvector matrix is too ill-conditioned (defective or nearly defective
//! input) the exponential falls back to scaling and squaring with a degree-6
//! Pade approximant, and the logarithm to inverse scaling and squaring
//! (Denman-Beavers square roots followed by a Mercator series).

use num_complex::Complex64 as C64;

use super::decomp::inverse;
use super::eigen::eig_general;
use super::matrix::{cr, CMatrix};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

pub fn matrix_exp(m: &CMatrix) -> Result<CMatrix> {
    matrix_exp_with(m, Tolerances::default().eig_condition_max)
}

pub fn matrix_exp_with(m: &CMatrix, max_condition: f64) -> Result<CMatrix> {
    m.require_square()?;
    m.require_finite()?;
    if let Some(out) = spectral_function(m, max_condition, |z| z.exp())? {
        return Ok(out);
    }
    Ok(expm_pade6(m))
}

/// Returns `V f(D) V^-1` when M is numerically diagonalizable.
fn spectral_function(
    m: &CMatrix,
    max_condition: f64,
    f: impl Fn(C64) -> C64,
) -> Result<Option<CMatrix>> {
    let eig = eig_general(m)?;
    let v = &eig.eigenvectors;
    let Some(v_inv) = inverse(v) else {
        return Ok(None);
    };
    let cond = v.frobenius_norm() * v_inv.frobenius_norm();
    if !cond.is_finite() || cond > max_condition {
        return Ok(None);
    }
    let n = m.rows();
    let fd: Vec<C64> = eig.eigenvalues.iter().map(|&z| f(z)).collect();
    let mut vf = v.clone();
    for j in 0..n {
        for i in 0..n {
            vf[(i, j)] *= fd[j];
        }
    }
    Ok(Some(&vf * &v_inv))
}

const PADE6: [f64; 7] = [
    1.0,
    1.0 / 2.0,
    5.0 / 44.0,
    1.0 / 66.0,
    1.0 / 792.0,
    1.0 / 15840.0,
    1.0 / 665280.0,
];

pub(crate) fn expm_pade6(m: &CMatrix) -> CMatrix {
    let n = m.rows();
    let norm = m.norm_one();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let x = m.scale_real(0.5f64.powi(squarings));
    let mut num = CMatrix::identity(n);
    let mut den = CMatrix::identity(n);
    let mut power = CMatrix::identity(n);
    for (k, &ck) in PADE6.iter().enumerate().skip(1) {
        power = &power * &x;
        let term = power.scale_real(ck);
        num = &num + &term;
        den = if k % 2 == 0 { &den + &term } else { &den - &term };
    }
    let mut r = &inverse(&den).expect("Pade denominator is well conditioned after scaling") * &num;
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// Principal matrix logarithm.
pub fn matrix_log_principal(m: &CMatrix) -> Result<CMatrix> {
    matrix_log_principal_with(m, &Tolerances::default())
}

pub fn matrix_log_principal_with(m: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    m.require_square()?;
    m.require_finite()?;
    let n = m.rows();
    let scale = m.frobenius_norm();
    if scale == 0.0 {
        return Err(Error::LogUndefined { re: 0.0, im: 0.0 });
    }

    let eig = eig_general(m)?;
    for z in &eig.eigenvalues {
        let mag = z.norm();
        if mag <= 1e-14 * scale || (z.re < 0.0 && z.im.abs() <= tol.log_branch * mag.max(1.0)) {
            return Err(Error::LogUndefined { re: z.re, im: z.im });
        }
    }

    let log = match spectral_function(m, tol.eig_condition_max, |z| z.ln())? {
        Some(l) => l,
        None => inverse_scaling_squaring_log(m)?,
    };

    let back = matrix_exp_with(&log, tol.eig_condition_max)?;
    let residual = (&back - m).frobenius_norm() / scale.max(1.0);
    if residual > tol.log_residual {
        // the spectral route can lose accuracy for clustered eigenvalues;
        // retry with the iterative route before giving up
        let alt = inverse_scaling_squaring_log(m)?;
        let back = expm_pade6(&alt);
        let alt_residual = (&back - m).frobenius_norm() / scale.max(1.0);
        if alt_residual <= tol.log_residual {
            return Ok(alt);
        }
        return Err(Error::LogInaccurate { residual: residual.min(alt_residual) });
    }
    debug_assert_eq!(log.rows(), n);
    Ok(log)
}

fn inverse_scaling_squaring_log(m: &CMatrix) -> Result<CMatrix> {
    let n = m.rows();
    let id = CMatrix::identity(n);
    let mut x = m.clone();
    let mut k = 0;
    while (&x - &id).norm_one() > 0.25 {
        x = sqrtm_denman_beavers(&x)?;
        k += 1;
        if k > 64 {
            return Err(Error::LogInaccurate { residual: f64::INFINITY });
        }
    }
    let e = &x - &id;
    let mut term = e.clone();
    let mut sum = CMatrix::zeros(n, n);
    for j in 1..200 {
        let contrib = term.scale_real(if j % 2 == 1 { 1.0 } else { -1.0 } / j as f64);
        sum = &sum + &contrib;
        if contrib.frobenius_norm() <= 1e-18 * sum.frobenius_norm().max(1e-300) {
            break;
        }
        term = &term * &e;
    }
    Ok(sum.scale_real(2f64.powi(k)))
}

fn sqrtm_denman_beavers(a: &CMatrix) -> Result<CMatrix> {
    let mut y = a.clone();
    let mut z = CMatrix::identity(a.rows());
    for _ in 0..100 {
        let y_inv = inverse(&y).ok_or(Error::LogUndefined { re: 0.0, im: 0.0 })?;
        let z_inv = inverse(&z).ok_or(Error::LogUndefined { re: 0.0, im: 0.0 })?;
        let y_next = (&y + &z_inv).scale(cr(0.5));
        let z_next = (&z + &y_inv).scale(cr(0.5));
        let delta = (&y_next - &y).frobenius_norm();
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * y.frobenius_norm() {
            break;
        }
    }
    Ok(y)
}
