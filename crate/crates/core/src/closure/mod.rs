//! Dynamical Lie algebra closure, membership and controllability verdicts.

pub mod controllability;
pub mod dense;
pub mod exact;
pub mod lemmas;
pub mod sp4;

pub use controllability::{
    condition_warnings, full_controllability, AnalysisOptions, ClosureSummary, ControllabilityVerdict,
};
pub use dense::{lie_closure, lie_closure_skew, membership, ClosureResult, Membership, DEFAULT_TOL, NOISE_FLOOR};
pub use exact::{exact_rank, lie_closure_exact, ExactClosure};
pub use lemmas::{chevalley_product_basis, verify_lemma_suite, CheckStatus, IdentityCheck};
pub use sp4::{check_sp4, sp4_defect, sp4_max_defect};
