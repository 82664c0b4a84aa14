//! Two-level atom driven by a collimated laser, with absorption/emission and
//! direct (gauge-term) scattering: reduced-state dynamics, cross sections and
//! fluorescence spectra in closed form, plus independent numerical oracles.

pub mod bloch;
pub mod cli;
pub mod error;
pub mod legendre;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod spectrum;
pub mod xsection;

pub use error::{Error, Result};
pub use model::{
    delta_g, g_pm, reduced_scalars, scalars_from_phase_shifts, DriveConfig, PhaseShiftTable, ReducedScalars,
    ScatteringScalars,
};
