//! Controllability analysis for an N-level system steered indirectly through
//! an M-qubit XY-chain accessor.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`] holds exact and floating structured operators of the form
//!   `Σ c · e_jk ⊗ σ_[α]` and their commutator algebra.
//! * [`model`] builds drift and control Hamiltonians from a [`ControlModel`]
//!   and evaluates the three sufficient controllability conditions.
//! * [`closure`] computes dynamical Lie algebras, membership, the sp(4)
//!   certificate and the lemma-level identity suite.
//! * [`pulse`] propagates piecewise-constant controls and synthesizes pulses
//!   by gradient ascent.
//! * [`config`] and [`report`] implement the text configuration format and
//!   the JSON analysis report used by the `accessor-ctrl` binary.

pub mod algebra;
pub mod closure;
pub mod config;
pub mod error;
pub mod model;
pub mod pulse;
pub mod report;

pub use algebra::{
    BasisOrder, Coeff, Exact, Pauli, PauliString, StructuredOperator, SystemBasisOp,
};
pub use closure::{ClosureResult, ControllabilityVerdict};
pub use error::{Error, Result};
pub use model::{ConditionReport, ControlModel, Coupling};
