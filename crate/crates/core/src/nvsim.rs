//! Synthetic NV-centre process-tomography experiments.
//!
//! Ground truth is the standard T1/T2 qubit channel in the rotating frame:
//! amplitude damping towards |0> (r_z = +1) at 1/T1, extra pure dephasing at
//! 1/T2 - 1/(2 T1), and a detuning rotation about z. Readout adds Gaussian
//! noise of width 1/sqrt(shots) to each Pauli expectation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{
    dissipator_superop, hamiltonian_superop, propagator, qubit_hamiltonian, GKSMatrix, Superoperator,
    TimeSchedule,
};
use crate::numkit::{c, cr, matrix_exp, sigma_x, sigma_y, CMatrix};
use crate::qpt::ChiMatrix;
use crate::qstate::{bloch_components, BlochVector, DensityMatrix, PauliExpectations};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Longitudinal relaxation time in ns; infinite disables it.
    pub t1_ns: f64,
    /// Transverse relaxation time in ns; at most 2 T1.
    pub t2_ns: f64,
    /// Rotating-frame detuning in rad/ns.
    pub detuning: f64,
    /// Pseudopure polarization.
    pub alpha: f64,
    /// Nutation frequency in rad/ns; sets the recorded pulse durations.
    pub rabi_frequency: f64,
    /// Shots per expectation value; 0 disables noise.
    pub shots: u64,
    pub seed: u64,
    /// Relative pulse-angle error: every rotation is by (1 + e) theta.
    pub pulse_error: f64,
    /// Keep the identity component of the pseudopure inputs.
    pub fold_polarization: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            t1_ns: 1000.0,
            t2_ns: 60.0,
            detuning: 0.0,
            alpha: 0.4,
            rabi_frequency: std::f64::consts::PI / 20.0,
            shots: 10_000,
            seed: 0,
            pulse_error: 0.0,
            fold_polarization: false,
        }
    }
}

impl SimConfig {
    pub fn noise_free() -> Self {
        Self { shots: 0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let (t1, t2) = (self.t1_ns, self.t2_ns);
        if !(t1 > 0.0 && t2 > 0.0) || t1.is_nan() || t2.is_nan() {
            return Err(Error::UnphysicalRelaxation { t1, t2 });
        }
        // 1/T2 >= 1/(2 T1), with round-off slack
        if 1.0 / t2 < 0.5 / t1 - 1e-12 * (1.0 / t2) {
            return Err(Error::UnphysicalRelaxation { t1, t2 });
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidArgument(format!("polarization {} outside [0, 1]", self.alpha)));
        }
        if self.fold_polarization && self.alpha == 0.0 {
            return Err(Error::InvalidArgument("folded polarization must be positive".into()));
        }
        if !(self.detuning.is_finite() && self.pulse_error.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(self.rabi_frequency > 0.0 && self.rabi_frequency.is_finite()) {
            return Err(Error::InvalidArgument("Rabi frequency must be positive".into()));
        }
        Ok(())
    }

    pub fn pi_pulse_ns(&self) -> f64 {
        std::f64::consts::PI / self.rabi_frequency
    }
}

/// exp(-i theta sigma / 2).
fn rotation(axis: &CMatrix, theta: f64) -> CMatrix {
    let (s, co) = (0.5 * theta).sin_cos();
    &CMatrix::identity(2).scale_real(co) - &axis.scale(c(0.0, s))
}

/// |0><0| through identity, R_y(pi), R_y(pi/2) and R_x(-pi/2), giving z+,
/// z-, x+, y+. With folding the pseudopure identity part is kept, so Bloch
/// vectors shrink by alpha.
pub fn prepare_inputs(cfg: &SimConfig) -> Result<[DensityMatrix; 4]> {
    cfg.validate()?;
    let k = 1.0 + cfg.pulse_error;
    let pi = std::f64::consts::PI;
    let pulses = [
        CMatrix::identity(2),
        rotation(&sigma_y(), k * pi),
        rotation(&sigma_y(), k * pi / 2.0),
        rotation(&sigma_x(), -k * pi / 2.0),
    ];
    let ground = CMatrix::from_real_diag(&[1.0, 0.0]);
    let weight = if cfg.fold_polarization { cfg.alpha } else { 1.0 };
    let mixed = CMatrix::identity(2).scale_real(0.5 * (1.0 - weight));
    let mut out = Vec::with_capacity(4);
    for u in &pulses {
        let pure = &(u * &ground) * &u.adjoint();
        out.push(DensityMatrix::new(&mixed + &pure.scale_real(weight))?);
    }
    Ok(out.try_into().expect("four inputs"))
}

/// GKS matrix of amplitude damping (L = sqrt(1/T1) |0><1|) plus pure
/// dephasing (L = sqrt(k) sigma_z / sqrt2, k = 1/T2 - 1/(2 T1)).
pub fn true_gks(cfg: &SimConfig) -> Result<GKSMatrix> {
    cfg.validate()?;
    let gamma = 1.0 / cfg.t1_ns;
    let dephasing = (1.0 / cfg.t2_ns - 0.5 * gamma).max(0.0);
    let mut a = CMatrix::zeros(3, 3);
    a[(0, 0)] = cr(0.5 * gamma);
    a[(1, 1)] = cr(0.5 * gamma);
    a[(0, 1)] = c(0.0, -0.5 * gamma);
    a[(1, 0)] = c(0.0, 0.5 * gamma);
    a[(2, 2)] = cr(dephasing);
    GKSMatrix::new(a)
}

/// (H^, R^) of the ground-truth dynamics.
pub fn true_generator(cfg: &SimConfig) -> Result<(Superoperator, Superoperator)> {
    let h = hamiltonian_superop(&qubit_hamiltonian(cfg.detuning))?;
    Ok((h, dissipator_superop(&true_gks(cfg)?)))
}

pub fn true_propagator(cfg: &SimConfig, t: f64) -> Result<Superoperator> {
    let (h, r) = true_generator(cfg)?;
    propagator(&r, &h, t)
}

pub fn true_chi(cfg: &SimConfig, t: f64) -> Result<ChiMatrix> {
    Ok(true_propagator(cfg, t)?.to_chi())
}

/// Gaussian readout noise, one stream per record.
pub struct Readout {
    rng: ChaCha8Rng,
    noise: Option<Normal<f64>>,
}

impl Readout {
    pub fn new(cfg: &SimConfig) -> Self {
        let noise = (cfg.shots > 0).then(|| Normal::new(0.0, 1.0 / (cfg.shots as f64).sqrt()).expect("finite sigma"));
        Self { rng: ChaCha8Rng::seed_from_u64(cfg.seed), noise }
    }

    /// Noisy sx, sy, sz of rho, clamped to [-1, 1].
    pub fn measure(&mut self, rho: &CMatrix) -> PauliExpectations {
        let r = bloch_components(rho).as_array();
        let mut out = [0.0; 3];
        for (o, v) in out.iter_mut().zip(r) {
            let noisy = match &self.noise {
                Some(n) => v + n.sample(&mut self.rng),
                None => v,
            };
            *o = noisy.clamp(-1.0, 1.0);
        }
        PauliExpectations::all(out[0], out[1], out[2])
    }
}

pub fn measure_expectations(rho: &DensityMatrix, cfg: &SimConfig) -> PauliExpectations {
    Readout::new(cfg).measure(rho.matrix())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub times_ns: Vec<f64>,
    /// Indexed [input][time], inputs in canonical order z+, z-, x+, y+.
    pub expectations: Vec<Vec<PauliExpectations>>,
    pub pi_pulse_ns: f64,
    pub config: SimConfig,
}

pub fn run_experiment(cfg: &SimConfig, schedule: &TimeSchedule) -> Result<ExperimentRecord> {
    let inputs = prepare_inputs(cfg)?;
    let (h, r) = true_generator(cfg)?;
    let g = crate::lindblad::generator(&r, &h);
    let times = schedule.times();
    let props: Vec<Superoperator> = times
        .iter()
        .map(|&t| Superoperator::new(matrix_exp(&g.scale_real(t))?))
        .collect::<Result<_>>()?;
    let mut readout = Readout::new(cfg);
    let mut expectations = Vec::with_capacity(4);
    for rho in &inputs {
        let mut row = Vec::with_capacity(times.len());
        for p in &props {
            row.push(readout.measure(&p.apply(rho.matrix())?));
        }
        expectations.push(row);
    }
    Ok(ExperimentRecord { times_ns: times, expectations, pi_pulse_ns: cfg.pi_pulse_ns(), config: *cfg })
}

/// Undoes polarization folding on the four outputs: with inputs alpha r_j
/// the outputs are alpha E r_j + t, and t is the mean of the z+ and z-
/// outputs, so E r_j + t = t + (out_j - t) / alpha.
pub fn rescale_polarization(outputs: &[BlochVector; 4], alpha: f64) -> Result<[BlochVector; 4]> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("polarization {alpha} must lie in (0, 1]")));
    }
    let t: [f64; 3] = std::array::from_fn(|k| 0.5 * (outputs[0].as_array()[k] + outputs[1].as_array()[k]));
    Ok(outputs.map(|o| {
        let v = o.as_array();
        BlochVector::from_array(std::array::from_fn(|k| t[k] + (v[k] - t[k]) / alpha))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpt::InputStateSet;

    #[test]
    fn ideal_pulses_give_canonical_inputs() {
        let ins = prepare_inputs(&SimConfig::default()).unwrap();
        for (got, want) in ins.iter().zip(InputStateSet::canonical().states()) {
            assert!(got.matrix().max_abs_diff(want.matrix()) < 1e-15);
        }
    }

    #[test]
    fn pulse_error_on_pi_pulse() {
        let cfg = SimConfig { pulse_error: 0.01, ..SimConfig::default() };
        let ins = prepare_inputs(&cfg).unwrap();
        let z = ins[1].bloch().z;
        assert!((z + (0.01 * std::f64::consts::PI).cos()).abs() < 1e-14);
    }

    #[test]
    fn folded_inputs_scale_by_alpha() {
        let cfg = SimConfig { fold_polarization: true, ..SimConfig::default() };
        let ins = prepare_inputs(&cfg).unwrap();
        for (rho, r) in ins.iter().zip(InputStateSet::bloch_vectors()) {
            let b = rho.bloch();
            for (x, y) in b.as_array().iter().zip(r.as_array()) {
                assert!((x - 0.4 * y).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn unphysical_pair_rejected() {
        let cfg = SimConfig { t1_ns: 10.0, t2_ns: 25.0, ..SimConfig::default() };
        assert!(matches!(true_generator(&cfg), Err(Error::UnphysicalRelaxation { .. })));
        let edge = SimConfig { t1_ns: 10.0, t2_ns: 20.0, ..SimConfig::default() };
        assert!(true_generator(&edge).is_ok());
    }

    #[test]
    fn zero_time_propagator_is_identity() {
        let p = true_propagator(&SimConfig::default(), 0.0).unwrap();
        assert_eq!(p, Superoperator::identity());
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let cfg = SimConfig { seed: 7, ..SimConfig::default() };
        let s = TimeSchedule::doubling(20.0).unwrap();
        assert_eq!(run_experiment(&cfg, &s).unwrap(), run_experiment(&cfg, &s).unwrap());
    }
}
