use num_complex::Complex64;

use crate::algebra::{qubit_system_term, rational_to_f64, Pauli, PauliString, StructuredOperator};
use crate::error::{Error, Result};

use super::control::ControlModel;
use super::hamiltonian::build_drift;

/// Rotation of a two-level system about the y axis, `U = exp(−iθσ_y/2) ⊗ 1_A`.
#[derive(Clone, Debug)]
pub struct FrameRotation {
    pub theta: f64,
    /// `sqrt(ω_S² + d_1²)`
    pub omega_prime: f64,
    unitary: StructuredOperator<Complex64>,
}

impl FrameRotation {
    pub fn new(theta: f64, m: usize) -> Self {
        let id = PauliString::identity(m);
        let c = qubit_system_term(m, Pauli::I, id, Complex64::new((theta / 2.0).cos(), 0.0)).expect("N = 2");
        let s = qubit_system_term(m, Pauli::Y, id, Complex64::new(0.0, -(theta / 2.0).sin())).expect("N = 2");
        FrameRotation {
            theta,
            omega_prime: 0.0,
            unitary: &c + &s,
        }
    }

    pub fn unitary(&self) -> &StructuredOperator<Complex64> {
        &self.unitary
    }

    /// `U† A U`
    pub fn apply(&self, op: &StructuredOperator<Complex64>) -> Result<StructuredOperator<Complex64>> {
        let out = self.unitary.adjoint().product(op)?.product(&self.unitary)?;
        Ok(out.prune(1e-14))
    }
}

/// Conjugates the drift of an `N = 2, M = 1` model into the frame where the
/// system part is `ω′_S σ_z ⊗ 1_A`.
pub fn rotate_system_frame(model: &ControlModel) -> Result<(StructuredOperator<Complex64>, FrameRotation)> {
    if model.n() != 2 || model.m() != 1 {
        return Err(Error::Unsupported(format!(
            "frame rotation needs N = 2, M = 1 (got N = {}, M = {})",
            model.n(),
            model.m()
        )));
    }
    let omega_s = rational_to_f64(&model.energies()[0]);
    let d1 = rational_to_f64(&model.excitation()[0]);
    let mut rot = FrameRotation::new(d1.atan2(omega_s), model.m());
    rot.omega_prime = omega_s.hypot(d1);
    let h0 = build_drift::<Complex64>(model);
    Ok((rot.apply(&h0)?, rot))
}
