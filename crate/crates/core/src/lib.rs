// SPDX-License-Identifier: Apache-2.0

//! Numerical engine for the adiabatic approximation of non-degenerate
//! two-level systems.
//!
//! The pipeline is: sample a [`model::HamiltonianSpec`] on a
//! [`model::TimeGrid`], build the gauge-fixed [`spectral::EigenFrame`],
//! propagate the dynamical operator `U_d` and assemble the adiabatic operator
//! `U_a` ([`evolve`]), then compare them ([`qaa`]). For scaled Hamiltonians
//! `H(t/T)`, [`scaling`] turns the comparison into an a-priori runtime
//! estimate. [`rotating`] holds a closed-form solvable case used as an
//! oracle, and [`cli`] is the batch frontend.

pub mod cli;
pub mod error;
pub mod evolve;
pub mod linalg;
pub mod model;
pub mod qaa;
pub mod rotating;
pub mod scaling;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{Ket, Mat2};
