//! Piecewise-constant pulse synthesis for state transfer on the system factor.

mod fidelity;
mod grape;
mod propagate;

pub use fidelity::{
    basis_state, reduced_system_state, state_fidelity, transfer_fidelity, transfer_fidelity_with, TransferTask,
    NORM_TOL,
};
pub use grape::{synthesize, Objective, SynthesisOptions};
pub use propagate::{propagate, unitarity_defect, ControlSystem, Eigen, PulseProgram};
