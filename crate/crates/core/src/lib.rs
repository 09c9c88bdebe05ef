#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN
//! Purification partners of local lattice modes and pure-state entanglement
//! harvesting from the vacuum of a discretized free scalar field.
//!
//! The crate is layered bottom-up:
//!
//! - [`gaussian`]: covariance matrices, symplectic maps, symplectic spectra and
//!   entropies. Every closed form elsewhere is checked against this layer.
//! - [`lattice`]: the periodic oscillator chain, its dispersion, vacuum
//!   correlators and quadratic Hamiltonian.
//! - [`modes`]: local modes from window functions and their standard form.
//! - [`partner`]: the partner mode, locality/purity checks and the entropy.
//! - [`harvest`]: the two swap operations onto external devices.
//! - [`energy_cost`]: the three-site energy-cost analysis with its oracle.
//! - [`cli`]: the command-line front end.
//!
//! Phase-space vectors are always ordered `(q_1..q_n, p_1..p_n)`.

pub mod cli;
pub mod energy_cost;
pub mod error;
pub mod gaussian;
pub mod harvest;
pub mod lattice;
pub mod modes;
pub mod partner;

pub use error::{Error, Result};
