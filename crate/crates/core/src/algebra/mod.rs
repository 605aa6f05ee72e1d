//! Structured operators `Σ c · e_jk ⊗ σ_[α]` and their Lie algebra.

mod dense;
mod operator;
mod pauli;
mod scalar;
mod system;

pub use dense::BasisOrder;
pub use operator::{nested_commutator, ChevalleyLabel, StructuredOperator};
pub use pauli::{Pauli, PauliString, Phase, MAX_QUBITS};
pub use scalar::{format_rational, rational, rational_from_f64, rational_to_f64, Coeff, Exact};
pub use system::{SystemBasisOp, Unit};

use num_complex::Complex64;

/// `coeff · σ ⊗ pauli` for a two-level system, with the system Pauli written in
/// the Chevalley units (`σ_x = x_1`, `σ_y = −y_1`, `σ_z = h_1`).
pub fn qubit_system_term<C: Coeff>(
    m: usize,
    system: Pauli,
    pauli: PauliString,
    coeff: C,
) -> crate::Result<StructuredOperator<C>> {
    let (op, sign) = match system {
        Pauli::I => (SystemBasisOp::Identity, C::one()),
        Pauli::X => (SystemBasisOp::x(1), C::one()),
        Pauli::Y => (SystemBasisOp::y(1), -C::one()),
        Pauli::Z => (SystemBasisOp::H(1), C::one()),
    };
    StructuredOperator::term(2, m, op, pauli, coeff * sign)
}

/// Floating `i`.
pub const I: Complex64 = Complex64::new(0.0, 1.0);
