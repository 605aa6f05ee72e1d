use crate::algebra::{Coeff, Pauli, PauliString, StructuredOperator, SystemBasisOp};

use super::control::ControlModel;

/// The four summands of the drift `H_0 = H_S⊗1_A + H_S′ + 1_S⊗H_A + H_SA`,
/// with `H_A` split into its free part and its chain coupling.
#[derive(Clone, Debug)]
pub struct DriftParts<C: Coeff> {
    /// `Σ E_j e_jj ⊗ 1_A`
    pub system: StructuredOperator<C>,
    /// `Σ d_j x_j ⊗ 1_A`
    pub excitation: StructuredOperator<C>,
    /// `1_S ⊗ Σ ω_j σ_z^j`
    pub accessor_free: StructuredOperator<C>,
    /// `1_S ⊗ Σ c_j σ_x^j σ_x^{j+1}`
    pub accessor_chain: StructuredOperator<C>,
    /// `Σ g s_j^(k) ⊗ σ_[α]`
    pub coupling: StructuredOperator<C>,
}

impl<C: Coeff> DriftParts<C> {
    pub fn accessor(&self) -> StructuredOperator<C> {
        &self.accessor_free + &self.accessor_chain
    }

    pub fn total(&self) -> StructuredOperator<C> {
        &(&(&self.system + &self.excitation) + &self.accessor()) + &self.coupling
    }
}

pub fn drift_parts<C: Coeff>(model: &ControlModel) -> DriftParts<C> {
    let (n, m) = (model.n(), model.m());
    let zero = || StructuredOperator::<C>::zero(n, m);
    // Indices come from a validated model, so construction cannot fail.
    let ok = |r: crate::Result<StructuredOperator<C>>| r.expect("validated model indices");

    let mut system = zero();
    for (j, e) in model.energies().iter().enumerate() {
        system = &system + &ok(StructuredOperator::system(n, m, SystemBasisOp::E(j + 1, j + 1), C::from_rational(e)));
    }

    let mut excitation = zero();
    for (j, d) in model.excitation().iter().enumerate() {
        excitation = &excitation + &ok(StructuredOperator::system(n, m, SystemBasisOp::x(j + 1), C::from_rational(d)));
    }

    let mut accessor_free = zero();
    for (j, w) in model.omega().iter().enumerate() {
        let z = PauliString::single(m, j + 1, Pauli::Z);
        accessor_free = &accessor_free + &ok(StructuredOperator::accessor(n, m, z, C::from_rational(w)));
    }

    let mut accessor_chain = zero();
    for (j, c) in model.chain().iter().enumerate() {
        let xx = PauliString::pair(m, j + 1, Pauli::X, Pauli::X);
        accessor_chain = &accessor_chain + &ok(StructuredOperator::accessor(n, m, xx, C::from_rational(c)));
    }

    let mut coupling = zero();
    for cp in model.couplings() {
        coupling = &coupling
            + &ok(StructuredOperator::term(n, m, SystemBasisOp::s(cp.j, cp.k), cp.alpha, C::from_rational(&cp.g)));
    }

    DriftParts {
        system,
        excitation,
        accessor_free,
        accessor_chain,
        coupling,
    }
}

/// The drift Hamiltonian `H_0`.
pub fn build_drift<C: Coeff>(model: &ControlModel) -> StructuredOperator<C> {
    drift_parts(model).total()
}

/// Control Hamiltonians `1_S⊗σ_x^1, 1_S⊗σ_y^1, …, 1_S⊗σ_y^M`, followed by one
/// `1_S⊗σ_[α]` per extra control.
pub fn build_controls<C: Coeff>(model: &ControlModel) -> Vec<StructuredOperator<C>> {
    control_strings(model)
        .into_iter()
        .map(|p| StructuredOperator::accessor(model.n(), model.m(), p, C::one()).expect("validated model"))
        .collect()
}

pub fn control_strings(model: &ControlModel) -> Vec<PauliString> {
    let m = model.m();
    let mut out = Vec::with_capacity(2 * m + model.extra_controls().len());
    for j in 1..=m {
        out.push(PauliString::single(m, j, Pauli::X));
        out.push(PauliString::single(m, j, Pauli::Y));
    }
    out.extend_from_slice(model.extra_controls());
    out
}

/// Channel names in [`build_controls`] order: `x1, y1, …, xM, yM`, then the
/// extra control strings.
pub fn control_labels(model: &ControlModel) -> Vec<String> {
    let mut out = Vec::new();
    for j in 1..=model.m() {
        out.push(format!("x{j}"));
        out.push(format!("y{j}"));
    }
    out.extend(model.extra_controls().iter().map(|p| p.to_string()));
    out
}
