//! Eigendecompositions for small dense complex matrices.
//!
//! Hermitian matrices use cyclic complex Jacobi rotations. General matrices
//! go through balancing, Givens reduction to Hessenberg form and shifted QR
//! iteration to a complex Schur form; eigenvectors are recovered from the
//! triangular factor by back substitution.

use num_complex::Complex64 as C64;

use super::matrix::{cr, CMatrix};
use crate::error::{Error, Result};

/// Eigenvalues in ascending order with the matching unitary eigenvector
/// matrix (eigenvectors are columns).
#[derive(Debug, Clone)]
pub struct EigResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl EigResult {
    /// V diag(f(lambda)) V^dag
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|x| x)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Hermitian eigendecomposition. The input is symmetrized as (M + M^dag)/2
/// first, so callers may pass matrices that are Hermitian up to round-off.
pub fn eig_hermitian(m: &CMatrix) -> Result<EigResult> {
    m.require_square()?;
    m.require_finite()?;
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();

    if scale > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-16 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate_pair(&mut a, &mut v, p, q, scale);
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, k| v[(i, pairs[k].1)]);
    Ok(EigResult { eigenvalues, eigenvectors })
}

fn rotate_pair(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, scale: f64) {
    let beta = a[(p, q)];
    let babs = beta.norm();
    if babs <= 1e-300 || babs <= 1e-18 * scale {
        a[(p, q)] = cr(0.0);
        a[(q, p)] = cr(0.0);
        return;
    }
    let alpha = a[(p, p)].re;
    let gamma = a[(q, q)].re;
    // phase to make the 2x2 block real, then a real rotation
    let phase = beta / babs;
    let tau = (gamma - alpha) / (2.0 * babs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;
    let upp = cr(cs);
    let upq = cr(sn);
    let uqp = -phase.conj() * sn;
    let uqq = phase.conj() * cs;
    let n = a.rows();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * upp + akq * uqp;
        a[(k, q)] = akp * upq + akq * uqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
        a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
    }
    a[(p, q)] = cr(0.0);
    a[(q, p)] = cr(0.0);
    a[(p, p)] = cr(a[(p, p)].re);
    a[(q, q)] = cr(a[(q, q)].re);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * upp + vkq * uqp;
        v[(k, q)] = vkp * upq + vkq * uqq;
    }
}

/// Eigen-decomposition of a general square matrix.
#[derive(Debug, Clone)]
pub struct GeneralEig {
    pub eigenvalues: Vec<C64>,
    /// Unit-norm eigenvectors as columns; not necessarily independent.
    pub eigenvectors: CMatrix,
}

const QR_MAX_ITER_PER_EIG: usize = 60;

/// Eigenvalues and eigenvectors of a general complex matrix.
pub fn eig_general(m: &CMatrix) -> Result<GeneralEig> {
    m.require_square()?;
    m.require_finite()?;
    let n = m.rows();
    let (mut h, scaling) = balance(m);
    let mut z = CMatrix::identity(n);
    hessenberg(&mut h, &mut z);
    schur_qr(&mut h, &mut z)?;

    let eigenvalues: Vec<C64> = (0..n).map(|i| h[(i, i)]).collect();
    let tnorm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let smin = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE * 1e10);

    let mut columns = Vec::with_capacity(n);
    for k in 0..n {
        let lam = h[(k, k)];
        let mut y = vec![cr(0.0); n];
        y[k] = cr(1.0);
        for j in (0..k).rev() {
            let s: C64 = ((j + 1)..=k).map(|l| h[(j, l)] * y[l]).sum();
            let mut denom = h[(j, j)] - lam;
            if denom.norm() < smin {
                denom = cr(smin);
            }
            y[j] = -s / denom;
        }
        // back to the balanced basis, then undo the balancing scaling
        let mut x = z.apply(&y);
        for (xi, d) in x.iter_mut().zip(&scaling) {
            *xi *= *d;
        }
        let norm = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for xi in x.iter_mut() {
                *xi /= norm;
            }
        }
        columns.push(x);
    }
    Ok(GeneralEig {
        eigenvalues,
        eigenvectors: CMatrix::from_columns(&columns),
    })
}

/// Parlett-Reinsch balancing with powers of two. Returns D^-1 M D and diag(D).
fn balance(m: &CMatrix) -> (CMatrix, Vec<f64>) {
    let n = m.rows();
    let mut a = m.clone();
    let mut d = vec![1.0f64; n];
    let radix = 2.0f64;
    let mut converged = false;
    let mut guard = 0;
    while !converged && guard < 100 {
        guard += 1;
        converged = true;
        for i in 0..n {
            let col: f64 = (0..n).filter(|&k| k != i).map(|k| a[(k, i)].norm()).sum();
            let row: f64 = (0..n).filter(|&k| k != i).map(|k| a[(i, k)].norm()).sum();
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let mut c = col;
            let s = col + row;
            let g = row / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            let g = row * radix;
            while c > g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + row) / f < 0.95 * s {
                converged = false;
                d[i] *= f;
                for k in 0..n {
                    a[(i, k)] /= f;
                    a[(k, i)] *= f;
                }
            }
        }
    }
    (a, d)
}

/// In-place Givens reduction to upper Hessenberg form, accumulating into z.
fn hessenberg(a: &mut CMatrix, z: &mut CMatrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    for j in 0..(n - 2) {
        for i in ((j + 2)..n).rev() {
            let x = a[(i - 1, j)];
            let y = a[(i, j)];
            if y.norm() == 0.0 {
                continue;
            }
            let g = Givens::new(x, y);
            g.apply_left(a, i - 1, 0);
            g.apply_right(a, i - 1, n);
            g.apply_right(z, i - 1, n);
            a[(i, j)] = cr(0.0);
        }
    }
}

/// Unitary Q = [[x/r, -conj(y)/r], [y/r, conj(x)/r]] with Q^dag (x, y) = (r, 0).
#[derive(Clone, Copy)]
struct Givens {
    a: C64,
    b: C64,
}

impl Givens {
    fn new(x: C64, y: C64) -> Self {
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        if r == 0.0 {
            Givens { a: cr(1.0), b: cr(0.0) }
        } else {
            Givens { a: x / r, b: y / r }
        }
    }

    /// rows (k, k+1) <- Q^dag rows, for columns from `col0` onwards.
    fn apply_left(&self, m: &mut CMatrix, k: usize, col0: usize) {
        for j in col0..m.cols() {
            let u = m[(k, j)];
            let w = m[(k + 1, j)];
            m[(k, j)] = self.a.conj() * u + self.b.conj() * w;
            m[(k + 1, j)] = -self.b * u + self.a * w;
        }
    }

    /// columns (k, k+1) <- columns Q, for rows below `row_end`.
    fn apply_right(&self, m: &mut CMatrix, k: usize, row_end: usize) {
        for i in 0..row_end.min(m.rows()) {
            let u = m[(i, k)];
            let w = m[(i, k + 1)];
            m[(i, k)] = u * self.a + w * self.b;
            m[(i, k + 1)] = -u * self.b.conj() + w * self.a.conj();
        }
    }
}

/// Shifted QR iteration on an upper Hessenberg matrix, producing an upper
/// triangular Schur factor in place and accumulating the unitary into z.
fn schur_qr(h: &mut CMatrix, z: &mut CMatrix) -> Result<()> {
    let n = h.rows();
    if n == 1 {
        return Ok(());
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // locate the start of the active unreduced block
        let mut l = hi;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s == 0.0 { h.frobenius_norm() } else { s };
            if h[(l, l - 1)].norm() <= f64::EPSILON * s {
                h[(l, l - 1)] = cr(0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > QR_MAX_ITER_PER_EIG * n {
            return Err(Error::InvalidArgument("QR iteration failed to converge".into()));
        }

        let shift = if iter % 11 == 0 {
            // exceptional shift to break cycles
            h[(hi, hi)] + cr(1.5 * h[(hi, hi - 1)].norm())
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for k in l..=hi {
            h[(k, k)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let g = Givens::new(h[(k, k)], h[(k + 1, k)]);
            g.apply_left(h, k, l.min(k));
            h[(k + 1, k)] = cr(0.0);
            rots.push(g);
        }
        for (idx, g) in rots.iter().enumerate() {
            let k = l + idx;
            // rows above the active block belong to the full Schur form too
            g.apply_right(h, k, (k + 2).min(hi + 1));
            g.apply_right(z, k, n);
        }
        for k in l..=hi {
            h[(k, k)] += shift;
        }
    }
    Ok(())
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr_half = (a + d) * 0.5;
    let diff_half = (a - d) * 0.5;
    let disc = (diff_half * diff_half + b * c).sqrt();
    let mu1 = tr_half + disc;
    let mu2 = tr_half - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}
