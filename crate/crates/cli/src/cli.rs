use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "nvqpt", version, about = "Single-qubit process tomography and Markovian generator fitting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate an NV-centre tomography experiment and write a measurement record.
    Simulate(SimulateArgs),
    /// Reconstruct the process matrix at one time of a record.
    Reconstruct(ReconstructArgs),
    /// Repair a process matrix to the nearest completely positive, trace-preserving one.
    Project(ProjectArgs),
    /// Compare two process matrices.
    Metrics(MetricsArgs),
    /// Fit a Markovian generator to a record on a doubling time grid.
    Lindblad(LindbladArgs),
    /// Sample the image of the Bloch sphere under a process as CSV.
    Ellipsoid(EllipsoidArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Longitudinal relaxation time T1 in ns ("inf" disables it).
    #[arg(long, default_value_t = 1000.0)]
    pub t1: f64,
    /// Transverse relaxation time T2 in ns; at most 2 T1.
    #[arg(long, default_value_t = 60.0)]
    pub t2: f64,
    /// Rotating-frame detuning in rad/ns.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub detuning: f64,
    /// Pseudopure polarization in [0, 1].
    #[arg(long, default_value_t = 0.4)]
    pub alpha: f64,
    /// Shots per expectation value; 0 gives a noise-free record.
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// First time of the doubling schedule, ns.
    #[arg(long = "t1ns", default_value_t = 20.0)]
    pub first_time: f64,
    /// Number of scheduled times t1ns * 2^m.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=16))]
    pub count: u64,
    /// Nutation frequency in rad/ns.
    #[arg(long, default_value_t = std::f64::consts::PI / 20.0)]
    pub rabi_frequency: f64,
    /// Relative pulse-angle error.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub pulse_error: f64,
    /// Keep the pseudopure identity part of the inputs (outputs are rescaled on analysis).
    #[arg(long)]
    pub fold: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    pub record: PathBuf,
    /// Time in ns at which to reconstruct.
    #[arg(long)]
    pub time: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    pub process: PathBuf,
    /// Weight of the trace-preservation penalty.
    #[arg(long)]
    pub lagrange: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    /// Emit JSON instead of a text table.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LindbladArgs {
    pub record: PathBuf,
    /// Detuning delta in rad/ns of the fit-frame Hamiltonian (delta/2) sigma_z.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub hamiltonian: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EllipsoidArgs {
    pub process: PathBuf,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub points: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
