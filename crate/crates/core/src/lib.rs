// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Multiqubit multimode quantum Rabi model.
//!
//! Parity-resolved Hamiltonians over a truncated Fock ⊗ spin basis, the
//! coupling-independent one-photon dark states and their finder, spectra,
//! closed and open time evolution for adiabatic W-state generation and
//! catch-and-release, and the circuit-to-model coupling map.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod circuitmap;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod operators;
pub mod solutions;
pub mod spectra;

pub use error::{Error, Result};
