use indexmap::IndexMap;
use nvqpt::cpfit::{project_to_cp, ProjectionOptions};
use nvqpt::lindblad::{
    gks_matrix, hamiltonian_superop, predict_expectations, propagator_from_outputs, qubit_hamiltonian,
    GeneratorFitOptions, TimeSchedule,
};
use nvqpt::nvsim::{run_experiment, SimConfig};
use nvqpt::pipeline::{estimate_generator, outputs_from_expectations, reconstruct};
use nvqpt::qpt::{ellipsoid_samples_with, jamiolkowski_state, tp_defect, unphysicality_norms, ChiMatrix, InputStateSet};
use nvqpt::qstate::{
    bures_from_fidelity, c_metric_from_fidelity, fidelity_matrices, trace_distance_matrices, BlochVector, MaxEntReport,
    PauliExpectations,
};
use nvqpt::{Error, Tolerances};

use crate::cli::*;
use crate::error::{data, numerical, usage, CliResult};
use crate::files::*;
use crate::format::{fmt6, sig6};

/// Environment variable naming a TOML file that overrides tolerances.
pub const TOLERANCES_ENV: &str = "NVQPT_TOLERANCES";

/// Eigenvalue slack for matrices read back from 6-digit files: a clipped
/// zero eigenvalue can print as about -1e-7.
const PRINTED_PSD_SLACK: f64 = 1e-5;

pub fn tolerances() -> CliResult<Tolerances> {
    match std::env::var_os(TOLERANCES_ENV) {
        None => Ok(Tolerances::default()),
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| data(format!("cannot read tolerance table {}: {e}", path.to_string_lossy())))?;
            Tolerances::from_toml_str(&text).map_err(data)
        }
    }
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let cfg = SimConfig {
        t1_ns: args.t1,
        t2_ns: args.t2,
        detuning: args.detuning,
        alpha: args.alpha,
        rabi_frequency: args.rabi_frequency,
        shots: args.shots,
        seed: args.seed,
        pulse_error: args.pulse_error,
        fold_polarization: args.fold,
    };
    cfg.validate().map_err(usage)?;
    let schedule = TimeSchedule::new(args.first_time, args.count as usize).map_err(usage)?;
    let rec = run_experiment(&cfg, &schedule).map_err(numerical)?;
    write_output(args.out.as_deref(), &to_json(&RecordFile::from_experiment(&rec)))
}

fn maxent_notes(reports: &[MaxEntReport; 4]) -> Vec<MaxEntNote> {
    InputStateSet::LABELS
        .iter()
        .zip(reports)
        .filter(|(_, r)| r.zero_filled.iter().any(|&z| z) || r.scaled_from.is_some())
        .map(|(label, r)| MaxEntNote {
            input: label.to_string(),
            zero_filled: ["sx", "sy", "sz"]
                .iter()
                .zip(r.zero_filled)
                .filter(|(_, z)| *z)
                .map(|(n, _)| n.to_string())
                .collect(),
            scaled_from: r.scaled_from.map(sig6),
        })
        .collect()
}

pub fn reconstruct_cmd(args: &ReconstructArgs) -> CliResult<()> {
    let rec = RecordFile::read(&args.record)?;
    let m = rec
        .time_index(args.time)
        .ok_or_else(|| data(format!("time {} ns not in record (times {:?})", args.time, rec.times_ns)))?;
    let r = reconstruct(&rec.expectations_at(m), rec.folded_alpha()).map_err(data)?;
    let notes = maxent_notes(&r.maxent);
    let diagnostics = Diagnostics {
        stage: Some("reconstruct".into()),
        time_ns: Some(rec.times_ns[m]),
        min_eigenvalue: Some(sig6(r.min_eigenvalue)),
        tp_defect: Some(sig6(r.tp_defect)),
        maxent: (!notes.is_empty()).then_some(notes),
        ..Diagnostics::default()
    };
    write_output(args.out.as_deref(), &to_json(&ProcessFile::from_chi(&r.chi, diagnostics)))
}

pub fn project(args: &ProjectArgs) -> CliResult<()> {
    let tol = tolerances()?;
    let input = ProcessFile::read(&args.process)?;
    let chi = input.chi()?.to_normal().map_err(data)?;
    let mut opts = ProjectionOptions::from_tolerances(&tol);
    if let Some(l) = args.lagrange {
        opts.lagrange = l;
    }
    let r = project_to_cp(&chi, &opts).map_err(|e| match e {
        Error::InvalidArgument(_) => usage(e),
        other => numerical(other),
    })?;
    let norms = unphysicality_norms(&chi, &r.chi_tilde).map_err(data)?;
    let d = r.diagnostics;
    let diagnostics = Diagnostics {
        stage: Some("project".into()),
        time_ns: input.diagnostics.time_ns,
        min_eigenvalue: Some(sig6(d.min_eigenvalue)),
        tp_defect: Some(sig6(d.tp_defect)),
        input_min_eigenvalue: Some(sig6(chi.min_eigenvalue())),
        distance: Some(Norms::from_core(&norms)),
        lagrange: Some(sig6(opts.lagrange)),
        deviation: Some(sig6(r.deviation)),
        start_deviation: Some(sig6(r.start_deviation)),
        evaluations: Some(r.evaluations),
        converged: Some(d.converged),
        success: Some(r.success),
        ..Diagnostics::default()
    };
    write_output(args.out.as_deref(), &to_json(&ProcessFile::from_chi(&r.chi_tilde, diagnostics)))?;
    eprintln!(
        "physicality: min eigenvalue {}, tp defect {}, distance to input {} (Frobenius)",
        fmt6(d.min_eigenvalue),
        fmt6(d.tp_defect),
        fmt6(d.distance_fro)
    );
    if !r.success {
        return Err(numerical(format!(
            "projection missed its thresholds: min eigenvalue {} (need >= {}), tp defect {} (need <= {})",
            fmt6(d.min_eigenvalue),
            opts.min_eigenvalue,
            fmt6(d.tp_defect),
            opts.tp_defect_max
        )));
    }
    Ok(())
}

fn is_cptp(chi: &ChiMatrix, tol: &Tolerances) -> bool {
    chi.min_eigenvalue() >= tol.cp_min_eigenvalue.min(-PRINTED_PSD_SLACK) && tp_defect(chi) <= tol.tp_defect_max
}

pub fn metrics(args: &MetricsArgs) -> CliResult<()> {
    let tol = tolerances()?;
    let a = ProcessFile::read(&args.first)?.chi()?;
    let b = ProcessFile::read(&args.second)?.chi()?;
    let n = unphysicality_norms(&a, &b).map_err(data)?;
    let both_cptp = is_cptp(&a, &tol) && is_cptp(&b, &tol);
    let mut report = MetricsReport {
        schema: METRICS_SCHEMA.into(),
        p1: sig6(n.p1),
        p2: sig6(n.p2),
        fro: sig6(n.fro),
        d_pro: sig6(n.d_pro),
        both_cptp,
        trace_distance: None,
        fidelity: None,
        bures: None,
        c: None,
    };
    if both_cptp {
        let ra = jamiolkowski_state(&a.to_normal().map_err(data)?).map_err(data)?;
        let rb = jamiolkowski_state(&b.to_normal().map_err(data)?).map_err(data)?;
        let f = fidelity_matrices(&ra, &rb).map_err(numerical)?;
        report.trace_distance = Some(sig6(trace_distance_matrices(&ra, &rb).map_err(numerical)?));
        report.fidelity = Some(sig6(f));
        report.bures = Some(sig6(bures_from_fidelity(f)));
        report.c = Some(sig6(c_metric_from_fidelity(f)));
    } else {
        eprintln!("warning: fidelity-based metrics suppressed: at least one process is not completely positive and trace preserving");
    }
    let text = if args.json { to_json(&report) } else { metrics_table(&report) };
    write_output(args.out.as_deref(), &text)
}

fn metrics_table(r: &MetricsReport) -> String {
    let mut rows = vec![
        ("p1", Some(r.p1)),
        ("p2", Some(r.p2)),
        ("fro", Some(r.fro)),
        ("d_pro", Some(r.d_pro)),
    ];
    let mut out = String::new();
    if r.both_cptp {
        rows.extend([
            ("trace_distance", r.trace_distance),
            ("fidelity", r.fidelity),
            ("bures", r.bures),
            ("c", r.c),
        ]);
    }
    for (name, v) in rows {
        out.push_str(&format!("{name:<16}{}\n", v.map(fmt6).unwrap_or_default()));
    }
    if !r.both_cptp {
        out.push_str("fidelity        suppressed: not both completely positive and trace preserving\n");
    }
    out
}

pub fn lindblad(args: &LindbladArgs) -> CliResult<()> {
    let tol = tolerances()?;
    let rec = RecordFile::read(&args.record)?;
    if rec.times_ns.len() < 3 {
        return Err(data(format!("generator fitting needs at least three doubling times, record has {}", rec.times_ns.len())));
    }
    let schedule = TimeSchedule::from_times(&rec.times_ns, &tol).map_err(data)?;
    let mut props = Vec::with_capacity(rec.times_ns.len());
    let mut measured = Vec::with_capacity(rec.times_ns.len());
    for m in 0..rec.times_ns.len() {
        let (outputs, _) = outputs_from_expectations(&rec.expectations_at(m), rec.folded_alpha()).map_err(data)?;
        props.push(propagator_from_outputs(&outputs).map_err(data)?);
        measured.push(outputs);
    }
    let h = hamiltonian_superop(&qubit_hamiltonian(args.hamiltonian)).map_err(usage)?;
    let est = estimate_generator(&props, &h, &schedule, &GeneratorFitOptions::default(), &tol).map_err(|e| match e {
        Error::Schedule(_) => data(e),
        other => numerical(other),
    })?;
    let log = est.log_estimate.as_ref().map_err(|e| {
        numerical(format!(
            "{e}\nhint: reduce t1 (the first time, now {} ns) so that each step rotates by less than pi",
            fmt6(schedule.t1())
        ))
    })?;

    let mut predicted = IndexMap::new();
    for (j, (label, input)) in InputStateSet::LABELS.iter().zip(InputStateSet::canonical().states()).enumerate() {
        let curve = predict_expectations(&est.fit.relaxation, &h, input, &rec.times_ns).map_err(numerical)?;
        let per_time = rec
            .times_ns
            .iter()
            .zip(curve)
            .enumerate()
            .map(|(m, (&t, p))| {
                let out = PauliExpectations::from_bloch(bloch_unchecked(&measured[m][j]));
                (time_key(t), Comparison { predicted: Expectation::from_pauli(&p), measured: Expectation::from_pauli(&out) })
            })
            .collect();
        predicted.insert(label.to_string(), per_time);
    }

    let report = LindbladReport {
        schema: LINDBLAD_SCHEMA.into(),
        times_ns: rec.times_ns.clone(),
        detuning: sig6(args.hamiltonian),
        a_start: ComplexMatrixJson::from_matrix(gks_matrix(&est.start.params).matrix()),
        a_fit: ComplexMatrixJson::from_matrix(est.fit.a.matrix()),
        projection_residual: sig6(est.start.residual),
        start_residual: sig6(est.fit.start_residual),
        residual: sig6(est.fit.residual),
        evaluations: est.fit.evaluations,
        converged: est.fit.converged,
        log_estimate_distance: sig6((log.matrix() - est.fit.relaxation.matrix()).frobenius_norm()),
        lindblads: est
            .lindblads
            .ops()
            .iter()
            .zip(est.lindblads.contributions())
            .map(|(op, &w)| LindbladOperatorJson { operator: ComplexMatrixJson::from_matrix(op), contribution: sig6(w) })
            .collect(),
        contributions: est.lindblads.contributions().iter().map(|&w| sig6(w)).collect(),
        predicted,
    };
    write_output(args.out.as_deref(), &to_json(&report))
}

/// Bloch vector of a Hermitian unit-trace matrix, even outside the ball.
fn bloch_unchecked(m: &nvqpt::numkit::CMatrix) -> BlochVector {
    BlochVector::from_array([2.0 * m[(1, 0)].re, 2.0 * m[(1, 0)].im, (m[(0, 0)] - m[(1, 1)]).re])
}

pub fn ellipsoid(args: &EllipsoidArgs) -> CliResult<()> {
    let tol = tolerances()?;
    let map = ProcessFile::read(&args.process)?.affine_map()?;
    let samples = ellipsoid_samples_with(&map, args.points as usize, &tol).map_err(usage)?;
    let mut csv = String::from("in_x,in_y,in_z,out_x,out_y,out_z,violation\n");
    for s in samples {
        let cells: Vec<String> = s.input.iter().chain(&s.output).map(|&x| fmt6(x)).collect();
        csv.push_str(&format!("{},{}\n", cells.join(","), s.violation));
    }
    write_output(args.out.as_deref(), &csv)
}
