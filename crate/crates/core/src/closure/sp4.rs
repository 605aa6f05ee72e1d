use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::BasisOrder;
use crate::error::{Error, Result};

use super::dense::ClosureResult;

/// Relative tolerance on `‖bᵀS + Sb‖`.
pub const SP4_TOL: f64 = 1e-10;

/// `S = [[0, 1], [−1, 0]]` in 2×2 blocks.
fn symplectic_form() -> DMatrix<Complex64> {
    let mut s = DMatrix::zeros(4, 4);
    for i in 0..2 {
        s[(i, i + 2)] = Complex64::new(1.0, 0.0);
        s[(i + 2, i)] = Complex64::new(-1.0, 0.0);
    }
    s
}

/// Reorders a matrix given in the default product basis into `order`.
pub fn reorder(a: &DMatrix<Complex64>, order: &BasisOrder) -> DMatrix<Complex64> {
    let p = order.permutation();
    DMatrix::from_fn(a.nrows(), a.ncols(), |r, c| a[(p[r], p[c])])
}

/// `‖bᵀS + Sb‖ / ‖b‖` for `b` in the default product basis of `N = 2, M = 1`.
pub fn sp4_defect(b: &DMatrix<Complex64>) -> Result<f64> {
    if b.nrows() != 4 || b.ncols() != 4 {
        return Err(Error::Unsupported(format!("sp(4) relation needs a 4×4 matrix, got {}×{}", b.nrows(), b.ncols())));
    }
    let x = reorder(b, &BasisOrder::qubit_pair_symplectic());
    let s = symplectic_form();
    let norm = x.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok((x.transpose() * &s + &s * &x).norm() / norm)
}

/// Largest relation defect over the closure basis.
pub fn sp4_max_defect(closure: &ClosureResult) -> Result<f64> {
    if closure.hilbert_dim != 4 {
        return Err(Error::Unsupported(format!(
            "sp(4) certificate needs a 4-dimensional ambient space, got {}",
            closure.hilbert_dim
        )));
    }
    closure.basis().iter().try_fold(0.0f64, |m, b| Ok(m.max(sp4_defect(b)?)))
}

/// True iff every basis element satisfies `bᵀS + Sb = 0` in the ordered basis
/// `{|00⟩, |10⟩, |11⟩, |01⟩}`.
pub fn check_sp4(closure: &ClosureResult) -> Result<bool> {
    Ok(sp4_max_defect(closure)? <= SP4_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{qubit_system_term, Pauli, StructuredOperator};
    use crate::closure::dense::lie_closure;

    fn op(s: Pauli, a: &str) -> StructuredOperator<Complex64> {
        qubit_system_term(1, s, a.parse().unwrap(), Complex64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn relation_on_single_elements() {
        let ix = op(Pauli::X, "I").to_dense_default() * crate::algebra::I;
        assert!(sp4_defect(&ix).unwrap() > 0.1);
        let ixz = op(Pauli::X, "Z").to_dense_default() * crate::algebra::I;
        assert!(sp4_defect(&ixz).unwrap() < 1e-15);
    }

    #[test]
    fn certificate_rejects_system_sigma_x() {
        let c = lie_closure(&[op(Pauli::X, "I"), op(Pauli::Z, "Z")], 1e-9).unwrap();
        assert!(!check_sp4(&c).unwrap());
        let c = lie_closure(&[op(Pauli::X, "Z")], 1e-9).unwrap();
        assert!(check_sp4(&c).unwrap());
    }

    #[test]
    fn wrong_ambient_is_unsupported() {
        let c = lie_closure(&[StructuredOperator::accessor(2, 2, "XX".parse().unwrap(), Complex64::new(1.0, 0.0)).unwrap()], 1e-9)
            .unwrap();
        assert!(matches!(check_sp4(&c), Err(Error::Unsupported(_))));
    }
}
