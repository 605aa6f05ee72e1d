use std::fmt;

use serde::{Deserialize, Serialize};

use super::scalar::Coeff;
use crate::error::{Error, Result};

/// Matrix unit `e_jk = |j⟩⟨k|` on the N-level system, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Unit {
    pub row: u16,
    pub col: u16,
}

impl Unit {
    pub fn new(row: usize, col: usize) -> Self {
        Unit {
            row: row as u16,
            col: col as u16,
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{},{}", self.row, self.col)
    }
}

/// Named system operators. Everything but `E` is a Chevalley-basis element (up
/// to the factor `i`) or the identity; all expand to raw matrix units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SystemBasisOp {
    /// `e_jk`
    E(usize, usize),
    /// `x_jk = e_jk + e_kj`, `j < k`
    X(usize, usize),
    /// `y_jk = i(e_jk − e_kj)`, `j < k`
    Y(usize, usize),
    /// `h_j = e_jj − e_{j+1,j+1}`, `1 ≤ j ≤ N−1`
    H(usize),
    Identity,
}

impl SystemBasisOp {
    /// `x_j = x_{j,j+1}`
    pub fn x(j: usize) -> Self {
        SystemBasisOp::X(j, j + 1)
    }

    /// `y_j = y_{j,j+1}`
    pub fn y(j: usize) -> Self {
        SystemBasisOp::Y(j, j + 1)
    }

    /// `s_j^(k)`: `x_j` for `k = 1`, `y_j` for `k = 2`.
    pub fn s(j: usize, k: u8) -> Self {
        if k == 1 {
            Self::x(j)
        } else {
            Self::y(j)
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let ok = match *self {
            SystemBasisOp::E(j, k) => (1..=n).contains(&j) && (1..=n).contains(&k),
            SystemBasisOp::X(j, k) | SystemBasisOp::Y(j, k) => j >= 1 && j < k && k <= n,
            SystemBasisOp::H(j) => j >= 1 && j < n,
            SystemBasisOp::Identity => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Index(format!("{self:?} for system dimension {n}")))
        }
    }

    /// Raw matrix-unit expansion.
    pub fn expand<C: Coeff>(&self, n: usize) -> Result<Vec<(Unit, C)>> {
        self.validate(n)?;
        let one = C::one();
        Ok(match *self {
            SystemBasisOp::E(j, k) => vec![(Unit::new(j, k), one)],
            SystemBasisOp::X(j, k) => vec![(Unit::new(j, k), one.clone()), (Unit::new(k, j), one)],
            SystemBasisOp::Y(j, k) => vec![
                (Unit::new(j, k), C::imag_unit()),
                (Unit::new(k, j), -C::imag_unit()),
            ],
            SystemBasisOp::H(j) => vec![(Unit::new(j, j), one.clone()), (Unit::new(j + 1, j + 1), -one)],
            SystemBasisOp::Identity => (1..=n).map(|j| (Unit::new(j, j), one.clone())).collect(),
        })
    }
}
