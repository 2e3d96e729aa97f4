//! Numerical toolkit for electron-on-neon (eNe) device physics.
//!
//! End-to-end model chain: cross-section electrostatics of etched coplanar
//! stripline resonators, per-mode impedance and electron-resonator coupling
//! estimation, Ne-film surface-morphology synthesis, trapped-electron
//! bound-state spectra, and microwave spectroscopy analysis.

pub mod consts;
pub mod error;
pub mod fieldsolver;
pub mod geometry;
pub mod resonator;
mod tridiag;
pub mod trapstates;
mod linsys;
pub mod morphology;
pub mod util;

pub use error::{Error, Result};
