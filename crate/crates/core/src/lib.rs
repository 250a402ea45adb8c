//! Spectral engine for a two-level atom coupled to a cavity photon that is in
//! turn coupled optomechanically to a phonon mode.
//!
//! The crate provides exact diagonalization of the truncated Hamiltonian,
//! closed-form generalized-rotating-wave (GRWA) and rotating-wave (RWA)
//! spectra with their embedded eigenstates, participation-ratio measures of
//! entanglement, and a parameter-sweep driver that writes CSV tables.

pub mod entanglement;
pub mod error;
pub mod exact;
pub mod hybrid;
pub mod label;
pub mod ops;
pub mod params;
pub mod qrm;
pub mod sweep;

pub use error::{Error, Result};
pub use exact::{
    converge_cutoffs, eigendecompose, match_embedded, match_states, solve_hybrid, solve_qrm, EigenSolution,
};
pub use label::{AnalyticStateLabel, Family, QrmLabel, Scheme, Sign};
pub use ops::{Cutoffs, Ket, Mode, ModeCutoff, Operator, SpaceLayout, C64};
pub use params::SystemParams;
pub use qrm::Embedded;
