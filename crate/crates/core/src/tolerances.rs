//! Central table of numerical tolerances.
//!
//! Every threshold used by the library lives here. The defaults can be
//! overridden from a TOML document; missing keys keep their default value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Maximum |M - M^dag| entry for a matrix to count as Hermitian.
    pub hermitian: f64,
    /// Cholesky pivots in [-psd_pivot, 0] are clamped to zero.
    pub psd_pivot: f64,
    /// Relative singular-value cutoff of the pseudoinverse.
    pub pinv_rcond: f64,
    /// Eigenvector matrices with a condition number above this are not
    /// used for spectral evaluation of matrix functions.
    pub eig_condition_max: f64,
    /// Distance of an eigenvalue from the negative real axis below which
    /// the principal logarithm is refused.
    pub log_branch: f64,
    /// Relative residual ||exp(log M) - M|| accepted from the logarithm.
    pub log_residual: f64,
    /// Slack on |r| <= 1 for Bloch vectors and density-matrix checks.
    pub state: f64,
    /// Eigenvalues of chi above -kraus_negative are clamped to zero.
    pub kraus_negative: f64,
    /// Projection success: minimum eigenvalue of the repaired chi.
    pub cp_min_eigenvalue: f64,
    /// Projection success: maximum trace-preservation defect.
    pub tp_defect_max: f64,
    /// Negative GKS eigenvalues beyond this are an error.
    pub gks_negative: f64,
    /// Lindblad operators with weight below lindblad_drop * max are dropped.
    pub lindblad_drop: f64,
    /// Output Bloch norms above 1 + protrusion are flagged.
    pub protrusion: f64,
    /// Relative slack when checking a doubling time schedule.
    pub schedule: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-8,
            psd_pivot: 1e-10,
            pinv_rcond: 1e-10,
            eig_condition_max: 1e8,
            log_branch: 1e-8,
            log_residual: 1e-8,
            state: 1e-9,
            kraus_negative: 1e-8,
            cp_min_eigenvalue: -1e-9,
            tp_defect_max: 1e-3,
            gks_negative: 1e-9,
            lindblad_drop: 1e-12,
            protrusion: 1e-9,
            schedule: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("tolerance table: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_override_keeps_defaults() {
        let tol = Tolerances::from_toml_str("tp_defect_max = 5e-4\n").unwrap();
        assert_eq!(tol.tp_defect_max, 5e-4);
        assert_eq!(tol.hermitian, Tolerances::default().hermitian);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(Tolerances::from_toml_str("nonsense = 1.0").is_err());
    }
}
