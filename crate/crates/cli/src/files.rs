//! JSON exchange formats: measurement records, process files and reports.
//!
//! Files are written pretty-printed with a trailing newline and with every
//! number already rounded to 6 significant digits, so write -> read -> write
//! reproduces the bytes.

use std::path::Path;

use indexmap::IndexMap;
use nvqpt::nvsim::{ExperimentRecord, SimConfig};
use nvqpt::numkit::{c, CMatrix};
use nvqpt::qpt::{chi_to_affine, AffineMap, BasisKind, ChiMatrix, InputStateSet, OperatorBasis};
use nvqpt::qstate::PauliExpectations;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{data, CliResult};
use crate::format::{fixed4, fmt6, imag_rows, real_rows, round4, sig6};

pub const RECORD_SCHEMA: &str = "qpt-record/1";
pub const PROCESS_SCHEMA: &str = "qpt-process/1";
pub const LINDBLAD_SCHEMA: &str = "qpt-lindblad/1";
pub const METRICS_SCHEMA: &str = "qpt-metrics/1";

/// Affine map stored next to chi may differ from chi_to_affine(chi) by
/// print rounding only.
const AFFINE_CONSISTENCY: f64 = 1e-4;
/// Largest asymmetry of a stored chi attributable to 6-digit rounding.
const PRINTED_HERMITIAN_SLACK: f64 = 1e-5;

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| data(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| data(format!("{}: {e}", path.display())))
}

/// Writes to `out`, or to standard output when no path is given.
pub fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| data(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_schema(found: &str, want: &str) -> CliResult<()> {
    if found != want {
        return Err(data(format!("schema \"{found}\" where \"{want}\" was expected")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub sx: Option<f64>,
    pub sy: Option<f64>,
    pub sz: Option<f64>,
}

impl Expectation {
    pub fn from_pauli(e: &PauliExpectations) -> Self {
        Self { sx: e.sx.map(sig6), sy: e.sy.map(sig6), sz: e.sz.map(sig6) }
    }

    pub fn to_pauli(self) -> PauliExpectations {
        PauliExpectations { sx: self.sx, sy: self.sy, sz: self.sz }
    }
}

/// Experiment metadata echoed into a record. Null relaxation times mean
/// infinite (or not applicable for records built from external data).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecordConfig {
    pub source: Option<String>,
    pub t1_ns: Option<f64>,
    pub t2_ns: Option<f64>,
    pub detuning: Option<f64>,
    pub alpha: Option<f64>,
    pub rabi_frequency: Option<f64>,
    pub pi_pulse_ns: Option<f64>,
    pub shots: Option<u64>,
    pub pulse_error: Option<f64>,
    /// Inputs kept their pseudopure identity part; outputs must be rescaled
    /// by `alpha` before reconstruction.
    pub fold_polarization: bool,
}

impl RecordConfig {
    pub fn from_sim(cfg: &SimConfig, pi_pulse_ns: f64) -> Self {
        let finite = |x: f64| x.is_finite().then(|| sig6(x));
        Self {
            source: Some("nvqpt simulate".into()),
            t1_ns: finite(cfg.t1_ns),
            t2_ns: finite(cfg.t2_ns),
            detuning: Some(sig6(cfg.detuning)),
            alpha: Some(sig6(cfg.alpha)),
            rabi_frequency: Some(sig6(cfg.rabi_frequency)),
            pi_pulse_ns: Some(sig6(pi_pulse_ns)),
            shots: Some(cfg.shots),
            pulse_error: Some(sig6(cfg.pulse_error)),
            fold_polarization: cfg.fold_polarization,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordFile {
    pub schema: String,
    pub times_ns: Vec<f64>,
    pub inputs: Vec<String>,
    /// input label -> time key -> expectations.
    pub expectations: IndexMap<String, IndexMap<String, Expectation>>,
    pub config: RecordConfig,
    pub seed: Option<u64>,
}

/// Key under which a time appears in the expectation table.
pub fn time_key(t: f64) -> String {
    fmt6(t)
}

impl RecordFile {
    pub fn from_experiment(rec: &ExperimentRecord) -> Self {
        let times_ns: Vec<f64> = rec.times_ns.iter().map(|&t| sig6(t)).collect();
        let expectations = InputStateSet::LABELS
            .iter()
            .zip(&rec.expectations)
            .map(|(label, row)| {
                let per_time = times_ns.iter().zip(row).map(|(&t, e)| (time_key(t), Expectation::from_pauli(e))).collect();
                (label.to_string(), per_time)
            })
            .collect();
        Self {
            schema: RECORD_SCHEMA.into(),
            times_ns,
            inputs: InputStateSet::LABELS.iter().map(|s| s.to_string()).collect(),
            expectations,
            config: RecordConfig::from_sim(&rec.config, rec.pi_pulse_ns),
            seed: Some(rec.config.seed),
        }
    }

    /// Record that a process with the given affine maps would produce on
    /// pseudopure inputs of polarization `alpha`: alpha E r_j + t per input.
    pub fn from_affine_maps(times_ns: &[f64], maps: &[AffineMap], alpha: f64, source: &str) -> Self {
        let inputs = InputStateSet::canonical();
        let expectations = InputStateSet::LABELS
            .iter()
            .zip(inputs.states())
            .map(|(label, state)| {
                let r = state.bloch().as_array().map(|x| alpha * x);
                let per_time = times_ns
                    .iter()
                    .zip(maps)
                    .map(|(&t, map)| {
                        let [sx, sy, sz] = map.apply(r).map(sig6);
                        (time_key(t), Expectation { sx: Some(sx), sy: Some(sy), sz: Some(sz) })
                    })
                    .collect();
                (label.to_string(), per_time)
            })
            .collect();
        Self {
            schema: RECORD_SCHEMA.into(),
            times_ns: times_ns.iter().map(|&t| sig6(t)).collect(),
            inputs: InputStateSet::LABELS.iter().map(|s| s.to_string()).collect(),
            expectations,
            config: RecordConfig {
                source: Some(source.into()),
                alpha: Some(sig6(alpha)),
                fold_polarization: alpha != 1.0,
                ..RecordConfig::default()
            },
            seed: None,
        }
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let rec: Self = read_json(path)?;
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> CliResult<()> {
        check_schema(&self.schema, RECORD_SCHEMA)?;
        if self.times_ns.is_empty() {
            return Err(data("record has no times"));
        }
        if self.times_ns.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(data("times must be finite and non-negative"));
        }
        if self.times_ns.windows(2).any(|w| w[1] <= w[0]) {
            return Err(data("times must be strictly increasing"));
        }
        if self.inputs != InputStateSet::LABELS {
            return Err(data(format!("inputs must be exactly {:?}", InputStateSet::LABELS)));
        }
        let labels: Vec<&String> = self.expectations.keys().collect();
        if labels != InputStateSet::LABELS.iter().collect::<Vec<_>>() {
            return Err(data("expectation table must list the inputs in canonical order"));
        }
        for (label, per_time) in &self.expectations {
            let keys: Vec<String> = self.times_ns.iter().map(|&t| time_key(t)).collect();
            if per_time.keys().cloned().collect::<Vec<_>>() != keys {
                return Err(data(format!("input {label}: time keys must be {keys:?}")));
            }
            for (t, e) in per_time {
                e.to_pauli().validate().map_err(|err| data(format!("input {label} at {t} ns: {err}")))?;
            }
        }
        if self.config.fold_polarization && self.config.alpha.is_none() {
            return Err(data("folded polarization needs config.alpha"));
        }
        Ok(())
    }

    /// Index of `time` in the schedule, to print precision.
    pub fn time_index(&self, time: f64) -> Option<usize> {
        let key = time_key(time);
        self.times_ns.iter().position(|&t| time_key(t) == key)
    }

    pub fn expectations_at(&self, m: usize) -> [PauliExpectations; 4] {
        let key = time_key(self.times_ns[m]);
        std::array::from_fn(|j| self.expectations[j][&key].to_pauli())
    }

    pub fn folded_alpha(&self) -> Option<f64> {
        if self.config.fold_polarization {
            self.config.alpha
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Norms {
    pub p1: f64,
    pub p2: f64,
    pub fro: f64,
    pub d_pro: f64,
}

impl Norms {
    pub fn from_core(n: &nvqpt::qpt::UnphysicalityNorms) -> Self {
        Self { p1: sig6(n.p1), p2: sig6(n.p2), fro: sig6(n.fro), d_pro: sig6(n.d_pro) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxEntNote {
    pub input: String,
    pub zero_filled: Vec<String>,
    /// Norm of the measured Bloch vector before it was scaled onto the sphere.
    pub scaled_from: Option<f64>,
}

/// Whatever the producing command knows about the matrix; absent fields are
/// omitted.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_ns: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tp_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maxent: Option<Vec<MaxEntNote>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_min_eigenvalue: Option<f64>,
    /// Distances between the input and output of a projection.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<Norms>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lagrange: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub success: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessFile {
    pub schema: String,
    pub basis: BasisKind,
    pub chi_re: [[f64; 4]; 4],
    pub chi_im: [[f64; 4]; 4],
    pub affine: [[f64; 4]; 4],
    pub diagnostics: Diagnostics,
}

impl ProcessFile {
    pub fn from_chi(chi: &ChiMatrix, diagnostics: Diagnostics) -> Self {
        Self {
            schema: PROCESS_SCHEMA.into(),
            basis: chi.basis().kind(),
            chi_re: fixed4(real_rows(chi.matrix())),
            chi_im: fixed4(imag_rows(chi.matrix())),
            affine: round4(*chi_to_affine(chi).rows()),
            diagnostics,
        }
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let p: Self = read_json(path)?;
        check_schema(&p.schema, PROCESS_SCHEMA)?;
        let chi = p.chi()?;
        let stored = p.affine_map()?;
        let off = chi_to_affine(&chi).max_abs_diff(&stored);
        if off > AFFINE_CONSISTENCY {
            return Err(data(format!("{}: affine map disagrees with chi by {off:.3e}", path.display())));
        }
        Ok(p)
    }

    pub fn chi(&self) -> CliResult<ChiMatrix> {
        let basis = match self.basis {
            BasisKind::Custom => return Err(data("custom operator bases cannot be stored in a process file")),
            kind => OperatorBasis::of_kind(kind).map_err(data)?,
        };
        let m = CMatrix::from_fn(4, 4, |i, j| c(self.chi_re[i][j], self.chi_im[i][j]));
        // entries are rounded independently, so mirrored pairs can disagree
        // in the last printed digit
        let deviation = m.hermitian_deviation();
        if deviation > PRINTED_HERMITIAN_SLACK {
            return Err(data(nvqpt::Error::NotHermitian { deviation }));
        }
        ChiMatrix::new(m.hermitian_part(), basis).map_err(data)
    }

    pub fn affine_map(&self) -> CliResult<AffineMap> {
        AffineMap::new(self.affine).map_err(data)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexMatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ComplexMatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self { re: real_rows(m), im: imag_rows(m) }
    }

    pub fn to_matrix(&self) -> CliResult<CMatrix> {
        let n = self.re.len();
        if self.im.len() != n || self.re.iter().chain(&self.im).any(|r| r.len() != n) {
            return Err(data("complex matrix needs square re and im parts of equal size"));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| c(self.re[i][j], self.im[i][j])))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladOperatorJson {
    pub operator: ComplexMatrixJson,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Comparison {
    pub predicted: Expectation,
    pub measured: Expectation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladReport {
    pub schema: String,
    pub times_ns: Vec<f64>,
    /// delta of the fit-frame Hamiltonian (delta/2) sigma_z, rad/ns.
    pub detuning: f64,
    pub a_start: ComplexMatrixJson,
    pub a_fit: ComplexMatrixJson,
    /// Part of the extrapolated generator outside the GKS form.
    pub projection_residual: f64,
    pub start_residual: f64,
    pub residual: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// ||R_log - R_fit||_F for the matrix-log estimate at the first time.
    pub log_estimate_distance: f64,
    pub lindblads: Vec<LindbladOperatorJson>,
    pub contributions: Vec<f64>,
    /// input label -> time key -> predicted and measured expectations.
    pub predicted: IndexMap<String, IndexMap<String, Comparison>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsReport {
    pub schema: String,
    pub p1: f64,
    pub p2: f64,
    pub fro: f64,
    pub d_pro: f64,
    pub both_cptp: bool,
    pub trace_distance: Option<f64>,
    pub fidelity: Option<f64>,
    pub bures: Option<f64>,
    pub c: Option<f64>,
}
