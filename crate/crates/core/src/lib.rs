//! Simulation toolkit for a flux-tunable superconducting micromaser.
//!
//! The crate covers the artificial-atom side (circuit Hamiltonian on a
//! phase grid, lowest levels, transition matrix elements, adiabaticity
//! figures), the cavity side (closed-form steady-state photon statistics
//! and a truncated-Fock master-equation engine used to check them), and
//! conversions to laboratory units.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod device;
pub mod error;
pub mod lindblad;
pub mod maser;
pub mod spectral;
pub mod transitions;

pub use error::{Error, Result};
