//! Ground states of the rotating Gross-Pitaevskii energy on bounded planar
//! domains, the Townes soliton and its constants, explicit trial states,
//! and blow-up diagnostics as the interaction strength approaches the
//! critical mass.

pub mod asymptotics;
pub mod energy;
pub mod error;
pub mod field_io;
pub mod grid;
pub mod linsolve;
pub mod minimize;
pub mod testfn;
pub mod townes;

pub use energy::{EnergyBreakdown, PotentialSpec};
pub use error::{Error, Result};
pub use grid::{ComplexField, DomainSpec, Grid};
pub use minimize::{MinimizeResult, SolverConfig};
pub use townes::TownesProfile;
