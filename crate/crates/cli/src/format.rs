//! Six-significant-digit rounding applied to every number the tool emits.

use nvqpt::numkit::CMatrix;

/// Rounds to 6 significant digits; non-finite values and zero pass through,
/// and negative zero becomes zero.
pub fn sig6(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Text form of a rounded value, shortest representation; exponent form
/// outside [1e-4, 1e6) in magnitude.
pub fn fmt6(x: f64) -> String {
    let r = sig6(x);
    if r != 0.0 && r.is_finite() && !(1e-4..1e6).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

pub fn round4(m: [[f64; 4]; 4]) -> [[f64; 4]; 4] {
    m.map(|row| row.map(sig6))
}

pub fn real_rows(m: &CMatrix) -> Vec<Vec<f64>> {
    m.real_parts().into_iter().map(|r| r.into_iter().map(sig6).collect()).collect()
}

pub fn imag_rows(m: &CMatrix) -> Vec<Vec<f64>> {
    m.imag_parts().into_iter().map(|r| r.into_iter().map(sig6).collect()).collect()
}

pub fn fixed4(rows: Vec<Vec<f64>>) -> [[f64; 4]; 4] {
    std::array::from_fn(|i| std::array::from_fn(|j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(sig6(0.123456789), 0.123457);
        assert_eq!(sig6(-1234567.0), -1234570.0);
        assert_eq!(sig6(1e-20), 1e-20);
        assert_eq!(sig6(-0.0).to_bits(), 0.0f64.to_bits());
        assert_eq!(sig6(sig6(std::f64::consts::PI)), sig6(std::f64::consts::PI));
        assert_eq!(fmt6(20.0), "20");
        assert_eq!(fmt6(5.23772e-17), "5.23772e-17");
        assert_eq!(fmt6(-0.000123), "-0.000123");
        assert!(sig6(f64::INFINITY).is_infinite());
    }
}
