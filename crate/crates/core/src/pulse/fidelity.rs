use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ControlModel;

use super::propagate::{ControlSystem, PulseProgram};

/// Unit-norm tolerance on task vectors.
pub const NORM_TOL: f64 = 1e-12;

/// Steer `|ψ_S⟩ ⊗ |φ_A⟩` so that the reduced system state overlaps `target`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferTask {
    pub initial_system: Vec<Complex64>,
    pub initial_accessor: Vec<Complex64>,
    pub target_system: Vec<Complex64>,
    pub horizon: f64,
}

fn check_unit(v: &[Complex64], len: usize, what: &str) -> Result<()> {
    if v.len() != len {
        return Err(Error::Dimension(format!("{what} has length {}, expected {len}", v.len())));
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Input(format!("{what} has norm {norm}, expected 1")));
    }
    Ok(())
}

/// `|k⟩` in a `dim`-dimensional space.
pub fn basis_state(dim: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[k] = Complex64::new(1.0, 0.0);
    v
}

impl TransferTask {
    /// Task with the accessor starting in `|0…0⟩`.
    pub fn new(initial_system: Vec<Complex64>, target_system: Vec<Complex64>, horizon: f64, m: usize) -> Self {
        TransferTask {
            initial_system,
            initial_accessor: basis_state(1 << m, 0),
            target_system,
            horizon,
        }
    }

    pub fn validate(&self, model: &ControlModel) -> Result<()> {
        check_unit(&self.initial_system, model.n(), "initial_system")?;
        check_unit(&self.initial_accessor, 1 << model.m(), "initial_accessor")?;
        check_unit(&self.target_system, model.n(), "target_system")?;
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::Input(format!("horizon T = {} must be positive", self.horizon)));
        }
        Ok(())
    }

    /// `|ψ_S⟩ ⊗ |φ_A⟩` in the system-major product basis.
    pub fn initial_state(&self) -> DVector<Complex64> {
        let a = self.initial_accessor.len();
        DVector::from_fn(self.initial_system.len() * a, |i, _| {
            self.initial_system[i / a] * self.initial_accessor[i % a]
        })
    }
}

/// `Tr_A |ψ⟩⟨ψ|` for `ψ` on an `n · a`-dimensional system-major product space.
pub fn reduced_system_state(psi: &DVector<Complex64>, n: usize) -> DMatrix<Complex64> {
    let a = psi.len() / n;
    DMatrix::from_fn(n, n, |r, c| (0..a).map(|k| psi[r * a + k] * psi[c * a + k].conj()).sum())
}

/// `⟨t| Tr_A(|ψ⟩⟨ψ|) |t⟩ = Σ_a |Σ_j conj(t_j) ψ_{j,a}|²`
pub fn state_fidelity(psi: &DVector<Complex64>, target: &[Complex64]) -> f64 {
    let n = target.len();
    let a = psi.len() / n;
    (0..a)
        .map(|k| {
            (0..n)
                .map(|j| target[j].conj() * psi[j * a + k])
                .sum::<Complex64>()
                .norm_sqr()
        })
        .sum()
}

pub fn transfer_fidelity_with(system: &ControlSystem, pulses: &PulseProgram, task: &TransferTask) -> Result<f64> {
    let u = system.propagate(pulses)?;
    Ok(state_fidelity(&(u * task.initial_state()), &task.target_system))
}

pub fn transfer_fidelity(model: &ControlModel, pulses: &PulseProgram, task: &TransferTask) -> Result<f64> {
    task.validate(model)?;
    transfer_fidelity_with(&ControlSystem::from_model(model), pulses, task)
}
