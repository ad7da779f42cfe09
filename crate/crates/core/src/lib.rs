//! Minimum-error discrimination of qubit ensembles and qubit channels that
//! preserve optimal measurements.

pub mod bloch;
pub mod channel;
pub mod cli;
pub mod discrimination;
pub mod ensemble;
pub mod error;
pub mod golden;
pub mod io;
pub mod linalg;
pub mod omp_check;
pub mod omp_construct;

pub use bloch::{Herm2, Tolerances, Vec3};
pub use channel::{CanonicalForm, CptpVerdict, QubitChannel};
pub use discrimination::{CaseTag, DiscriminationSolution, Measurement};
pub use ensemble::Ensemble;
pub use error::{OmpError, Result};
