use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operator::StructuredOperator;
use super::pauli::{Pauli, PauliString};
use super::scalar::Coeff;
use crate::error::{Error, Result};

/// Ordering of the `2^M · N` product basis states.
///
/// The default (lexicographic, system-major) index of `|j⟩_S ⊗ |a_1 … a_M⟩_A`
/// is `(j − 1) · 2^M + a`, where qubit 1 is the most significant bit of `a`
/// and `|0⟩` is the `σ_z = +1` state. A custom order stores, for each output
/// position, the default index placed there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisOrder {
    perm: Vec<usize>,
}

impl BasisOrder {
    pub fn lexicographic(dim: usize) -> Self {
        BasisOrder {
            perm: (0..dim).collect(),
        }
    }

    pub fn from_permutation(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Input(format!("{perm:?} is not a permutation")));
            }
        }
        Ok(BasisOrder { perm })
    }

    /// Builds an order from `(system level 0-based, accessor bit string)` labels,
    /// e.g. `[(0, "0"), (1, "0"), (1, "1"), (0, "1")]`.
    pub fn from_labels(n: usize, m: usize, labels: &[(usize, &str)]) -> Result<Self> {
        if labels.len() != n << m {
            return Err(Error::Input(format!(
                "{} labels for a {}-dimensional space",
                labels.len(),
                n << m
            )));
        }
        let perm = labels
            .iter()
            .map(|&(s, bits)| {
                if s >= n || bits.len() != m {
                    return Err(Error::Input(format!("label ({s}, {bits}) out of range")));
                }
                let a = usize::from_str_radix(if m == 0 { "0" } else { bits }, 2)
                    .map_err(|_| Error::Input(format!("accessor label `{bits}` is not binary")))?;
                Ok((s << m) + a)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_permutation(perm)
    }

    /// `{|0⟩|0⟩, |1⟩|0⟩, |1⟩|1⟩, |0⟩|1⟩}` for one system qubit and one
    /// accessor qubit. In this order the sp(4) relation takes its standard
    /// block form.
    pub fn qubit_pair_symplectic() -> Self {
        Self::from_labels(2, 1, &[(0, "0"), (1, "0"), (1, "1"), (0, "1")])
            .expect("fixed labels are valid")
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }
}

/// Column action of a Pauli string on the computational basis: `σ|a⟩ = c·|a ⊕ flip⟩`.
fn pauli_column<C: Coeff>(p: &PauliString, a: usize) -> (usize, C) {
    let m = p.len();
    let mut row = a;
    let mut c = C::one();
    for site in 1..=m {
        let bit = (a >> (m - site)) & 1;
        match p.get(site) {
            Pauli::I => {}
            Pauli::X => row ^= 1 << (m - site),
            Pauli::Y => {
                row ^= 1 << (m - site);
                // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
                c = if bit == 0 { c * C::imag_unit() } else { c * -C::imag_unit() };
            }
            Pauli::Z => {
                if bit == 1 {
                    c = -c;
                }
            }
        }
    }
    (row, c)
}

impl<C: Coeff> StructuredOperator<C> {
    /// Row-major dense matrix in the default order, in the operator's own
    /// coefficient field.
    pub fn to_dense_entries(&self) -> Vec<C> {
        let dim_a = 1usize << self.accessor_len();
        let dim = self.hilbert_dim();
        let mut out = vec![C::zero(); dim * dim];
        for (u, p, c) in self.terms() {
            let (r0, c0) = ((u.row as usize - 1) * dim_a, (u.col as usize - 1) * dim_a);
            for a in 0..dim_a {
                let (b, v) = pauli_column::<C>(&p, a);
                let idx = (r0 + b) * dim + c0 + a;
                out[idx] = out[idx].clone() + c.clone() * v;
            }
        }
        out
    }

    /// Dense complex matrix with rows and columns arranged by `order`.
    pub fn to_dense(&self, order: &BasisOrder) -> Result<DMatrix<Complex64>> {
        let dim = self.hilbert_dim();
        if order.dim() != dim {
            return Err(Error::Dimension(format!(
                "basis order of size {} for a {dim}-dimensional operator",
                order.dim()
            )));
        }
        let entries = self.to_dense_entries();
        let perm = order.permutation();
        Ok(DMatrix::from_fn(dim, dim, |r, c| entries[perm[r] * dim + perm[c]].to_c64()))
    }

    pub fn to_dense_default(&self) -> DMatrix<Complex64> {
        self.to_dense(&BasisOrder::lexicographic(self.hilbert_dim()))
            .expect("default order matches")
    }
}
