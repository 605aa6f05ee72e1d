use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_controls, build_drift, control_labels, ControlModel};

/// Piecewise-constant control fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseProgram {
    pub segment_count: usize,
    pub dt: f64,
    /// Channel names in control order.
    pub channels: Vec<String>,
    /// `amplitudes[s][k]` drives channel `k` during segment `s`.
    pub amplitudes: Vec<Vec<f64>>,
    /// Best fidelity after each accepted or rejected iteration.
    pub fidelity_trace: Vec<f64>,
    pub fidelity: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl PulseProgram {
    /// All-zero amplitudes on `segment_count` segments of length `dt`.
    pub fn zeros(model: &ControlModel, segment_count: usize, dt: f64) -> Self {
        let channels = control_labels(model);
        PulseProgram {
            segment_count,
            dt,
            amplitudes: vec![vec![0.0; channels.len()]; segment_count],
            channels,
            fidelity_trace: Vec::new(),
            fidelity: 0.0,
            iterations: 0,
            converged: false,
        }
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.segment_count as f64
    }
}

/// Hermitian eigendecomposition `H = V diag(λ) V†`.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl Eigen {
    pub fn new(h: &DMatrix<Complex64>) -> Self {
        let e = h.clone().symmetric_eigen();
        Eigen {
            values: e.eigenvalues,
            vectors: e.eigenvectors,
        }
    }

    /// `exp(−i H dt)`
    pub fn propagator(&self, dt: f64) -> DMatrix<Complex64> {
        let phases = self.values.map(|l| Complex64::from_polar(1.0, -l * dt));
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |r, c| self.vectors[(r, c)] * phases[c]);
        scaled * self.vectors.adjoint()
    }
}

/// Dense drift and control matrices of a model.
#[derive(Clone, Debug)]
pub struct ControlSystem {
    pub drift: DMatrix<Complex64>,
    pub controls: Vec<DMatrix<Complex64>>,
}

impl ControlSystem {
    pub fn from_model(model: &ControlModel) -> Self {
        ControlSystem {
            drift: build_drift::<Complex64>(model).to_dense_default(),
            controls: build_controls::<Complex64>(model)
                .iter()
                .map(|c| c.to_dense_default())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.drift.nrows()
    }

    /// `H_0 + Σ_k a_k W_k`
    pub fn hamiltonian(&self, amplitudes: &[f64]) -> DMatrix<Complex64> {
        let mut h = self.drift.clone();
        for (a, w) in amplitudes.iter().zip(&self.controls) {
            if *a != 0.0 {
                h += w * Complex64::new(*a, 0.0);
            }
        }
        h
    }

    pub fn check_program(&self, pulses: &PulseProgram) -> Result<()> {
        if !(pulses.dt.is_finite() && pulses.dt > 0.0) {
            return Err(Error::Input(format!("segment duration {} is not a positive number", pulses.dt)));
        }
        if pulses.amplitudes.len() != pulses.segment_count {
            return Err(Error::Dimension(format!(
                "{} amplitude rows for {} segments",
                pulses.amplitudes.len(),
                pulses.segment_count
            )));
        }
        for (s, row) in pulses.amplitudes.iter().enumerate() {
            if row.len() != self.controls.len() {
                return Err(Error::Dimension(format!(
                    "segment {s} has {} amplitudes, model has {} controls",
                    row.len(),
                    self.controls.len()
                )));
            }
            if let Some(k) = row.iter().position(|a| !a.is_finite()) {
                return Err(Error::Input(format!("non-finite amplitude at segment {s}, channel {k}")));
            }
        }
        Ok(())
    }

    /// Ordered product of segment propagators, earliest segment rightmost.
    pub fn propagate(&self, pulses: &PulseProgram) -> Result<DMatrix<Complex64>> {
        self.check_program(pulses)?;
        let mut u = DMatrix::identity(self.dim(), self.dim());
        for row in &pulses.amplitudes {
            u = Eigen::new(&self.hamiltonian(row)).propagator(pulses.dt) * u;
        }
        Ok(u)
    }
}

pub fn propagate(model: &ControlModel, pulses: &PulseProgram) -> Result<DMatrix<Complex64>> {
    ControlSystem::from_model(model).propagate(pulses)
}

/// `‖U†U − 1‖_max`
pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let d = u.adjoint() * u - DMatrix::<Complex64>::identity(u.nrows(), u.ncols());
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
