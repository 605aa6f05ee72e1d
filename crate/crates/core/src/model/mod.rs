//! Problem instances, their Hamiltonians and the sufficient conditions.

mod conditions;
mod control;
mod frame;
mod hamiltonian;
pub mod linalg;

pub use conditions::{
    check_condition1, check_condition2, check_condition3, check_conditions, coupling_matrix,
    explicit_condition3_n3, partial_energy, subalgebra_membership, Arithmetic, Condition1, Condition2,
    Condition2Witness, Condition3, Condition3Method, ConditionReport, ExplicitBranch, ExplicitN3,
    SubalgebraMembership, RANK_TOL, ZERO_TOL,
};
pub use control::{ControlModel, Coupling, IntoRational};
pub use frame::{rotate_system_frame, FrameRotation};
pub use hamiltonian::{build_controls, build_drift, control_labels, control_strings, drift_parts, DriftParts};
