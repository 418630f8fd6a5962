//! Single-qubit quantum process tomography.
//!
//! The crate reconstructs a qubit channel from tomographic data, repairs it to
//! the nearest completely positive trace-preserving map, and fits a Markovian
//! (GKS/Lindblad) generator to propagators measured on a doubling time grid.
//! A small NV-centre simulator produces synthetic records for end-to-end
//! checks.

pub mod cpfit;
pub mod error;
pub mod lindblad;
pub mod numkit;
pub mod nvsim;
pub mod pipeline;
pub mod qpt;
pub mod qstate;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;
