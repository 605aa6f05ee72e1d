use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::{rational_from_f64, rational_to_f64, PauliString, MAX_QUBITS};
use crate::error::{Error, Result};

/// Conversion of user-facing numbers into exact model parameters.
pub trait IntoRational {
    fn into_rational(self) -> Option<BigRational>;
}

impl IntoRational for BigRational {
    fn into_rational(self) -> Option<BigRational> {
        Some(self)
    }
}

impl IntoRational for &BigRational {
    fn into_rational(self) -> Option<BigRational> {
        Some(self.clone())
    }
}

impl IntoRational for i64 {
    fn into_rational(self) -> Option<BigRational> {
        Some(BigRational::from_integer(BigInt::from(self)))
    }
}

impl IntoRational for i32 {
    fn into_rational(self) -> Option<BigRational> {
        (self as i64).into_rational()
    }
}

/// Exact binary value of the float.
impl IntoRational for f64 {
    fn into_rational(self) -> Option<BigRational> {
        rational_from_f64(self)
    }
}

fn convert<T: IntoRational>(name: &str, values: Vec<T>) -> Result<Vec<BigRational>> {
    values
        .into_iter()
        .map(|v| {
            v.into_rational()
                .ok_or_else(|| Error::InvalidModel(format!("non-finite value in {name}")))
        })
        .collect()
}

/// One system–accessor coupling term `g · s_j^(k) ⊗ σ_[α]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    /// Transition index, `1 ≤ j ≤ N − 1`.
    pub j: usize,
    /// `1` selects `x_j`, `2` selects `y_j`.
    pub k: u8,
    /// Accessor string over {X, Y}.
    pub alpha: PauliString,
    pub g: BigRational,
}

/// Full problem instance: an N-level system with energies `E_j` and constant
/// excitations `d_j`, an M-qubit XY chain with frequencies `ω_j` and couplings
/// `c_j`, the system–accessor coupling table, and any extra accessor controls.
///
/// Parameters are exact rationals; energies are mean-shifted on construction
/// so that `Σ E_j = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlModel {
    n: usize,
    m: usize,
    energies: Vec<BigRational>,
    omega: Vec<BigRational>,
    chain: Vec<BigRational>,
    excitation: Vec<BigRational>,
    couplings: Vec<Coupling>,
    extra_controls: Vec<PauliString>,
}

impl ControlModel {
    pub fn new<T: IntoRational>(
        n: usize,
        m: usize,
        energies: Vec<T>,
        omega: Vec<T>,
        chain: Vec<T>,
        excitation: Vec<T>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidModel(format!("system dimension N={n} must be at least 2")));
        }
        if !(1..=MAX_QUBITS).contains(&m) {
            return Err(Error::InvalidModel(format!(
                "accessor length M={m} must lie in 1..={MAX_QUBITS}"
            )));
        }
        let energies = convert("E", energies)?;
        let omega = convert("omega", omega)?;
        let chain = convert("c", chain)?;
        let excitation = convert("d", excitation)?;
        let check = |name: &str, got: usize, want: usize| {
            if got == want {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!("{name} length {got}, expected {want}")))
            }
        };
        check("E", energies.len(), n)?;
        check("omega", omega.len(), m)?;
        check("c", chain.len(), m - 1)?;
        check("d", excitation.len(), n - 1)?;

        let mean = energies.iter().fold(BigRational::zero(), |a, b| a + b)
            / BigRational::from_integer(BigInt::from(n));
        let energies = energies.into_iter().map(|e| e - &mean).collect();
        Ok(ControlModel {
            n,
            m,
            energies,
            omega,
            chain,
            excitation,
            couplings: Vec::new(),
            extra_controls: Vec::new(),
        })
    }

    pub fn add_coupling<T: IntoRational>(&mut self, j: usize, k: u8, alpha: PauliString, g: T) -> Result<()> {
        if j < 1 || j >= self.n {
            return Err(Error::InvalidModel(format!("coupling j={j} outside 1..={}", self.n - 1)));
        }
        if k != 1 && k != 2 {
            return Err(Error::InvalidModel(format!("coupling k={k} must be 1 or 2")));
        }
        if alpha.len() != self.m {
            return Err(Error::InvalidModel(format!(
                "coupling alpha {alpha} has length {}, expected M={}",
                alpha.len(),
                self.m
            )));
        }
        if !alpha.only_xy() {
            return Err(Error::InvalidModel(format!("coupling alpha {alpha} must use only X and Y")));
        }
        let g = g
            .into_rational()
            .ok_or_else(|| Error::InvalidModel("non-finite coupling g".into()))?;
        self.couplings.push(Coupling { j, k, alpha, g });
        Ok(())
    }

    /// Builder form of [`add_coupling`](Self::add_coupling) taking the accessor
    /// string as text.
    pub fn with_coupling<T: IntoRational>(mut self, j: usize, k: u8, alpha: &str, g: T) -> Result<Self> {
        let alpha: PauliString = alpha.parse()?;
        self.add_coupling(j, k, alpha, g)?;
        Ok(self)
    }

    pub fn add_extra_control(&mut self, pauli: PauliString) -> Result<()> {
        if pauli.len() != self.m {
            return Err(Error::InvalidModel(format!(
                "extra control {pauli} has length {}, expected M={}",
                pauli.len(),
                self.m
            )));
        }
        if pauli.is_identity() {
            return Err(Error::InvalidModel("extra control must not be the identity".into()));
        }
        self.extra_controls.push(pauli);
        Ok(())
    }

    pub fn with_extra_control(mut self, pauli: &str) -> Result<Self> {
        self.add_extra_control(pauli.parse()?)?;
        Ok(self)
    }

    /// Copy with the excitation strengths replaced.
    pub fn with_excitation<T: IntoRational>(&self, excitation: Vec<T>) -> Result<Self> {
        let excitation = convert("d", excitation)?;
        if excitation.len() != self.n - 1 {
            return Err(Error::InvalidModel(format!(
                "d length {}, expected {}",
                excitation.len(),
                self.n - 1
            )));
        }
        Ok(ControlModel {
            excitation,
            ..self.clone()
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Full Hilbert-space dimension `2^M · N`.
    pub fn hilbert_dim(&self) -> usize {
        self.n << self.m
    }

    /// `dim su(2^M N)`.
    pub fn expected_dim(&self) -> usize {
        let d = self.hilbert_dim();
        d * d - 1
    }

    pub fn energies(&self) -> &[BigRational] {
        &self.energies
    }

    pub fn omega(&self) -> &[BigRational] {
        &self.omega
    }

    pub fn chain(&self) -> &[BigRational] {
        &self.chain
    }

    pub fn excitation(&self) -> &[BigRational] {
        &self.excitation
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn extra_controls(&self) -> &[PauliString] {
        &self.extra_controls
    }

    pub fn energies_f64(&self) -> Vec<f64> {
        self.energies.iter().map(rational_to_f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;

    #[test]
    fn energies_are_mean_shifted() {
        let m = ControlModel::new(3, 1, vec![-1, 0, 2], vec![1], vec![], vec![1, 1]).unwrap();
        assert_eq!(m.energies(), &[rational(-4, 3), rational(-1, 3), rational(5, 3)]);
        let sum = m.energies().iter().fold(BigRational::zero(), |a, b| a + b);
        assert!(sum.is_zero());
    }

    #[test]
    fn length_mismatches_rejected() {
        assert!(ControlModel::new(3, 1, vec![1, 2], vec![1], vec![], vec![1, 1]).is_err());
        assert!(ControlModel::new(2, 2, vec![1, -1], vec![1, 1], vec![], vec![1]).is_err());
        assert!(ControlModel::new(2, 1, vec![1, -1], vec![1], vec![], vec![]).is_err());
        assert!(ControlModel::new(1, 1, vec![0], vec![1], vec![], vec![]).is_err());
    }

    #[test]
    fn couplings_validated() {
        let base = ControlModel::new(2, 2, vec![1, -1], vec![1, 1], vec![1], vec![1]).unwrap();
        assert!(base.clone().with_coupling(1, 1, "XY", 1).is_ok());
        assert!(base.clone().with_coupling(1, 1, "XZ", 1).is_err());
        assert!(base.clone().with_coupling(2, 1, "XX", 1).is_err());
        assert!(base.clone().with_coupling(1, 3, "XX", 1).is_err());
        assert!(base.clone().with_coupling(1, 1, "X", 1).is_err());
        assert!(base.clone().with_extra_control("II").is_err());
        assert!(base.with_extra_control("XX").is_ok());
    }
}
