use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Derivative at zero of a matrix-valued function sampled on the doubling
/// grid `t1, 2 t1, 4 t1`, by two levels of Richardson extrapolation of the
/// forward difference quotient. Exact for polynomials of degree <= 3.
pub fn richardson_derivative(samples: &[CMatrix], base_value: &CMatrix, t1: f64) -> Result<CMatrix> {
    if samples.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "richardson extrapolation needs samples at t1, 2t1, 4t1; got {}",
            samples.len()
        )));
    }
    if !(t1 > 0.0 && t1.is_finite()) {
        return Err(Error::InvalidArgument(format!("t1 must be positive, got {t1}")));
    }
    if samples.iter().any(|s| s.shape() != base_value.shape()) {
        return Err(Error::ShapeMismatch("richardson samples differ in shape".into()));
    }
    let quotient = |k: usize| -> CMatrix {
        let h = t1 * (1u32 << k) as f64;
        (&samples[k] - base_value).scale_real(1.0 / h)
    };
    let d0 = [quotient(0), quotient(1), quotient(2)];
    let d1_h = &d0[0].scale_real(2.0) - &d0[1];
    let d1_2h = &d0[1].scale_real(2.0) - &d0[2];
    Ok((&d1_h.scale_real(4.0) - &d1_2h).scale_real(1.0 / 3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::matrix::cr;

    fn scalar(x: f64) -> CMatrix {
        CMatrix::from_diag(&[cr(x)])
    }

    #[test]
    fn exact_on_linear() {
        let f = |t: f64| scalar(1.0 + 3.0 * t);
        let d = richardson_derivative(&[f(0.1), f(0.2), f(0.4)], &f(0.0), 0.1).unwrap();
        assert!((d[(0, 0)].re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn exact_on_cubic() {
        let f = |t: f64| scalar(2.0 - t + 5.0 * t * t - 7.0 * t * t * t);
        let d = richardson_derivative(&[f(0.5), f(1.0), f(2.0)], &f(0.0), 0.5).unwrap();
        assert!((d[(0, 0)].re + 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_scalar() {
        // leading truncation term of the two-level table is f''''(0) h^3 / 3
        let f = |t: f64| scalar((3.0 * t).exp());
        let h = 0.01;
        let d = richardson_derivative(&[f(h), f(2.0 * h), f(4.0 * h)], &f(0.0), h).unwrap();
        let err = d[(0, 0)].re - 3.0;
        let leading = 81.0 * h.powi(3) / 3.0;
        assert!(err.abs() < 3e-5);
        assert!((err / leading - 1.0).abs() < 0.1, "err {err:e} vs {leading:e}");
    }

    #[test]
    fn rejects_wrong_count_and_shape() {
        let z = scalar(0.0);
        assert!(richardson_derivative(&[z.clone(), z.clone()], &z, 1.0).is_err());
        let big = CMatrix::zeros(2, 2);
        assert!(matches!(
            richardson_derivative(&[z.clone(), z.clone(), big], &z, 1.0),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
