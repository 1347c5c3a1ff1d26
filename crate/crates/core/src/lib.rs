//! Reconstruction of SU(4) spin-chain couplings from ground-state
//! correlations and entanglement spectra.

pub mod bw;
pub mod chain;
pub mod error;
pub mod lanczos;
pub mod optimize;
pub mod qcm;
pub mod registry;
pub mod su4;
pub mod xvbs;

#[cfg(test)]
mod oracle;

pub use error::{Error, Result};
