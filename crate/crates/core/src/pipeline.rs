//! Reference data loading and the end-to-end analysis chain shared by the
//! command-line tool and the regression tests.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::lindblad::{
    fit_generator, generator_bch_estimate, generator_log_estimate_with, gks_start_from_generator_with,
    lindblads_from_gks_with, GKSStart, GeneratorFit, GeneratorFitOptions, LindbladSet, Superoperator, TimeSchedule,
};
use crate::numkit::{c, CMatrix};
use crate::nvsim::rescale_polarization;
use crate::qpt::{affine_to_chi, chi_from_outputs, chi_to_affine, tp_defect, AffineMap, ChiMatrix};
use crate::qstate::{bloch_matrix, maxent_reconstruct_report, MaxEntReport, PauliExpectations};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PublishedProcess {
    pub time_ns: f64,
    pub experimental: [[f64; 4]; 4],
    pub reconstructed: [[f64; 4]; 4],
}

impl PublishedProcess {
    pub fn experimental_affine(&self) -> Result<AffineMap> {
        AffineMap::new(self.experimental)
    }

    pub fn reconstructed_affine(&self) -> Result<AffineMap> {
        AffineMap::new(self.reconstructed)
    }

    pub fn experimental_chi(&self) -> Result<ChiMatrix> {
        Ok(affine_to_chi(&self.experimental_affine()?))
    }

    pub fn reconstructed_chi(&self) -> Result<ChiMatrix> {
        Ok(affine_to_chi(&self.reconstructed_affine()?))
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PublishedDiscrepancy {
    pub time_ns: f64,
    pub p1: f64,
    pub p2: f64,
    pub fro: f64,
    pub d_pro: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PublishedLindblad {
    pub scale: f64,
    /// [re, im] pairs, row-major.
    pub entries: [[[f64; 2]; 2]; 2],
    pub contribution_percent: f64,
}

impl PublishedLindblad {
    pub fn operator(&self) -> CMatrix {
        CMatrix::from_fn(2, 2, |i, j| {
            let [re, im] = self.entries[i][j];
            c(re * self.scale, im * self.scale)
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PublishedData {
    pub process: Vec<PublishedProcess>,
    pub discrepancy: Vec<PublishedDiscrepancy>,
    pub lindblad: Vec<PublishedLindblad>,
}

impl PublishedData {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::InvalidArgument(format!("reference data: {e}")))
    }

    pub fn discrepancy_at(&self, time_ns: f64) -> Option<&PublishedDiscrepancy> {
        self.discrepancy.iter().find(|d| d.time_ns == time_ns)
    }
}

/// MaxEnt estimate of each output state as (I + r.sigma)/2. With folded
/// polarization the Bloch vectors are first rescaled to the alpha = 1
/// experiment, after which noisy vectors may sit slightly outside the ball.
pub fn outputs_from_expectations(
    expectations: &[PauliExpectations; 4],
    folded_alpha: Option<f64>,
) -> Result<([CMatrix; 4], [MaxEntReport; 4])> {
    let estimates = expectations.map(|e| maxent_reconstruct_report(&e));
    let reports = estimates.clone().map(|(_, r)| r);
    let mut bloch = estimates.map(|(rho, _)| rho.bloch());
    if let Some(alpha) = folded_alpha {
        bloch = rescale_polarization(&bloch, alpha)?;
    }
    Ok((bloch.map(bloch_matrix), reports))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub chi: ChiMatrix,
    pub affine: AffineMap,
    pub min_eigenvalue: f64,
    pub tp_defect: f64,
    pub maxent: [MaxEntReport; 4],
}

/// MaxEnt per input, then lambda, beta and chi by linear inversion.
pub fn reconstruct(expectations: &[PauliExpectations; 4], folded_alpha: Option<f64>) -> Result<Reconstruction> {
    let (outputs, maxent) = outputs_from_expectations(expectations, folded_alpha)?;
    let chi = chi_from_outputs(&outputs)?;
    Ok(Reconstruction {
        affine: chi_to_affine(&chi),
        min_eigenvalue: chi.min_eigenvalue(),
        tp_defect: tp_defect(&chi),
        chi,
        maxent,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorEstimate {
    /// Richardson estimate of the relaxation superoperator.
    pub r_re: Superoperator,
    pub start: GKSStart,
    pub fit: GeneratorFit,
    pub lindblads: LindbladSet,
    /// Matrix-log estimate at the first time, or why it does not exist.
    pub log_estimate: Result<Superoperator>,
}

/// Richardson estimate -> projection onto the GKS form -> simplex fit ->
/// Lindblad extraction. The estimate uses the first three times; the fit
/// uses all of them.
pub fn estimate_generator(
    propagators: &[Superoperator],
    hamiltonian: &Superoperator,
    schedule: &TimeSchedule,
    opts: &GeneratorFitOptions,
    tol: &Tolerances,
) -> Result<GeneratorEstimate> {
    if schedule.count() < 3 || propagators.len() != schedule.count() {
        return Err(Error::Schedule(format!(
            "generator estimation needs one propagator per time on at least three doubling times; got {} on {}",
            propagators.len(),
            schedule.count()
        )));
    }
    let head = TimeSchedule::new(schedule.t1(), 3)?;
    let r_re = generator_bch_estimate(&propagators[..3], hamiltonian, &head)?;
    let start = gks_start_from_generator_with(&r_re, tol)?;
    let fit = fit_generator(propagators, hamiltonian, schedule, &start.params, opts)?;
    let lindblads = lindblads_from_gks_with(&fit.a, tol)?;
    let log_estimate = generator_log_estimate_with(&propagators[0], hamiltonian, schedule.t1(), tol);
    Ok(GeneratorEstimate { r_re, start, fit, lindblads, log_estimate })
}
