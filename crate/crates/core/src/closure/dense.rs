use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{StructuredOperator, I};
use crate::error::{Error, Result};

/// Default relative threshold for accepting a new direction.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Hermitian-part tolerance on `i·H` for closure inputs.
pub const SKEW_TOL: f64 = 1e-10;

/// Candidates commuted per parallel batch before serial orthogonalization.
const BATCH: usize = 128;

/// Brackets of unit-norm basis elements with a smaller norm than this are
/// roundoff from commuting pairs and are discarded before the relative test.
pub const NOISE_FLOOR: f64 = 1e-11;

/// Real Lie algebra spanned by a set of skew-Hermitian operators.
///
/// `basis` is Hilbert–Schmidt orthonormal under `Re tr(A†B)`.
#[derive(Clone, Debug)]
pub struct ClosureResult {
    pub dimension: usize,
    pub expected_dim: usize,
    pub controllable: bool,
    /// Number of breadth-first sweeps performed.
    pub iterations: usize,
    /// Largest relative residual among rejected candidates.
    pub residual_floor: f64,
    /// Smallest relative residual among accepted candidates.
    pub weakest_accepted: f64,
    pub hilbert_dim: usize,
    pub tol: f64,
    basis: Vec<DMatrix<Complex64>>,
    coords: DMatrix<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    /// `‖candidate − projection‖ / ‖candidate‖`
    pub residual: f64,
}

impl ClosureResult {
    pub fn basis(&self) -> &[DMatrix<Complex64>] {
        &self.basis
    }

    /// Coordinates of the basis in the compact real embedding, one column per element.
    pub fn coordinates(&self) -> nalgebra::DMatrixView<'_, f64> {
        self.coords.columns(0, self.dimension)
    }

    /// Relative distance of a skew-Hermitian matrix from the span.
    pub fn residual_of(&self, candidate: &DMatrix<Complex64>) -> Result<f64> {
        if candidate.nrows() != self.hilbert_dim || candidate.ncols() != self.hilbert_dim {
            return Err(Error::Dimension(format!(
                "{}×{} candidate for a {}-dimensional closure",
                candidate.nrows(),
                candidate.ncols(),
                self.hilbert_dim
            )));
        }
        check_skew(candidate, "membership candidate")?;
        let v = compact(candidate);
        let norm = v.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let q = self.coordinates();
        let mut r = v.clone();
        for _ in 0..2 {
            let proj = q.tr_mul(&r);
            r -= q * proj;
        }
        Ok(r.norm() / norm)
    }

    /// Projection membership test for a skew-Hermitian dense matrix.
    pub fn membership_dense(&self, candidate: &DMatrix<Complex64>, tol: f64) -> Result<Membership> {
        let residual = self.residual_of(candidate)?;
        Ok(Membership {
            member: residual < tol,
            residual,
        })
    }
}

/// Is the skew-Hermitian `candidate` in the span of `closure`? The zero
/// operator belongs to every closure.
pub fn membership(
    candidate: &StructuredOperator<Complex64>,
    closure: &ClosureResult,
    tol: f64,
) -> Result<Membership> {
    if candidate.hilbert_dim() != closure.hilbert_dim {
        return Err(Error::Dimension(format!(
            "candidate on a {}-dimensional space, closure on {}",
            candidate.hilbert_dim(),
            closure.hilbert_dim
        )));
    }
    closure.membership_dense(&candidate.to_dense_default(), tol)
}

fn check_skew(a: &DMatrix<Complex64>, what: &str) -> Result<()> {
    let herm = (a + a.adjoint()).norm();
    let scale = a.norm().max(1.0);
    if herm > SKEW_TOL * scale {
        return Err(Error::ContractViolation(format!(
            "{what} is not skew-Hermitian (Hermitian part {herm:.3e})"
        )));
    }
    Ok(())
}

/// Isometric embedding of a `d×d` skew-Hermitian matrix into `R^{d²}`:
/// `√2·Re A_rc, √2·Im A_rc` for `r < c`, then `Im A_rr`.
pub(crate) fn compact(a: &DMatrix<Complex64>) -> DVector<f64> {
    let d = a.nrows();
    let mut v = DVector::zeros(d * d);
    let s = std::f64::consts::SQRT_2;
    let mut idx = 0;
    for r in 0..d {
        for c in r + 1..d {
            let z = a[(r, c)];
            v[idx] = s * z.re;
            v[idx + 1] = s * z.im;
            idx += 2;
        }
    }
    for r in 0..d {
        v[idx] = a[(r, r)].im;
        idx += 1;
    }
    v
}

/// `[a, b]`
fn bracket(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a * b - b * a
}

struct Builder {
    d: usize,
    tol: f64,
    max_dim: usize,
    basis: Vec<DMatrix<Complex64>>,
    coords: DMatrix<f64>,
    residual_floor: f64,
    weakest_accepted: f64,
}

impl Builder {
    fn new(d: usize, tol: f64, max_dim: usize) -> Self {
        Builder {
            d,
            tol,
            max_dim,
            basis: Vec::new(),
            coords: DMatrix::zeros(d * d, max_dim.max(1)),
            residual_floor: 0.0,
            weakest_accepted: f64::INFINITY,
        }
    }

    fn full(&self) -> bool {
        self.basis.len() >= self.max_dim
    }

    /// Orthogonalizes a batch against the current basis (two classical
    /// Gram–Schmidt passes as matrix products), then accepts candidates one by
    /// one in order, re-orthogonalizing each against vectors accepted earlier
    /// in the same batch.
    fn absorb(&mut self, batch: Vec<DVector<f64>>) {
        if batch.is_empty() || self.full() {
            return;
        }
        let k0 = self.basis.len();
        let raw_norms: Vec<f64> = batch.iter().map(|v| v.norm()).collect();
        let mut w = DMatrix::from_columns(&batch);
        if k0 > 0 {
            let q = self.coords.columns(0, k0);
            for _ in 0..2 {
                let proj = q.tr_mul(&w);
                w -= q * proj;
            }
        }
        for j in 0..batch.len() {
            if self.full() {
                break;
            }
            let raw = raw_norms[j];
            if raw <= NOISE_FLOOR {
                continue;
            }
            let mut r = w.column(j).into_owned();
            let k1 = self.basis.len();
            if k1 > k0 {
                let q = self.coords.columns(k0, k1 - k0);
                for _ in 0..2 {
                    let proj = q.tr_mul(&r);
                    r -= q * proj;
                }
            }
            let rel = r.norm() / raw;
            if rel > self.tol {
                self.weakest_accepted = self.weakest_accepted.min(rel);
                let unit = &r / r.norm();
                self.coords.set_column(k1, &unit);
                self.basis.push(expand(&unit, self.d));
            } else {
                self.residual_floor = self.residual_floor.max(rel);
            }
        }
    }
}

/// Inverse of [`compact`].
fn expand(v: &DVector<f64>, d: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::zeros(d, d);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut idx = 0;
    for r in 0..d {
        for c in r + 1..d {
            let z = Complex64::new(s * v[idx], s * v[idx + 1]);
            a[(r, c)] = z;
            a[(c, r)] = -z.conj();
            idx += 2;
        }
    }
    for r in 0..d {
        a[(r, r)] = Complex64::new(0.0, v[idx]);
        idx += 1;
    }
    a
}

/// Lie closure of `{i·H : H ∈ hamiltonians}`.
///
/// Generators are scaled to unit norm and fed through the basis in order.
/// Each sweep commutes every element added in the previous sweep with every
/// element that precedes it; a commutator joins the basis when its orthogonal
/// residual exceeds `tol` times its own norm. Stops when a sweep adds nothing
/// or the dimension reaches `dim su(d)`.
pub fn lie_closure(hamiltonians: &[StructuredOperator<Complex64>], tol: f64) -> Result<ClosureResult> {
    let Some(first) = hamiltonians.first() else {
        return Err(Error::Input("lie_closure needs at least one generator".into()));
    };
    let d = first.hilbert_dim();
    let mut generators = Vec::with_capacity(hamiltonians.len());
    for h in hamiltonians {
        if h.hilbert_dim() != d {
            return Err(Error::Dimension("generators on different spaces".into()));
        }
        generators.push(h.to_dense_default() * I);
    }
    lie_closure_skew(&generators, tol)
}

/// [`lie_closure`] for generators already given as skew-Hermitian matrices.
pub fn lie_closure_skew(generators: &[DMatrix<Complex64>], tol: f64) -> Result<ClosureResult> {
    let Some(first) = generators.first() else {
        return Err(Error::Input("lie_closure needs at least one generator".into()));
    };
    let d = first.nrows();
    let expected = d * d - 1;
    let mut b = Builder::new(d, tol, expected);

    let mut seeds = Vec::new();
    for (idx, g) in generators.iter().enumerate() {
        if g.nrows() != d || g.ncols() != d {
            return Err(Error::Dimension(format!("generator {idx} is not {d}×{d}")));
        }
        check_skew(g, &format!("generator {idx}"))?;
        let n = g.norm();
        if n == 0.0 {
            continue;
        }
        seeds.push(compact(&(g / Complex64::new(n, 0.0))));
    }
    b.absorb(seeds);

    let mut iterations = 0;
    let mut frontier = 0;
    while frontier < b.basis.len() && !b.full() {
        iterations += 1;
        let end = b.basis.len();
        let pairs: Vec<(usize, usize)> = (frontier..end).flat_map(|a| (0..a).map(move |c| (a, c))).collect();
        for chunk in pairs.chunks(BATCH) {
            if b.full() {
                break;
            }
            let basis = &b.basis;
            let batch: Vec<DVector<f64>> = chunk
                .par_iter()
                .map(|&(a, c)| compact(&bracket(&basis[a], &basis[c])))
                .collect();
            b.absorb(batch);
        }
        frontier = end;
    }

    let dimension = b.basis.len();
    Ok(ClosureResult {
        dimension,
        expected_dim: expected,
        controllable: dimension == expected,
        iterations,
        residual_floor: b.residual_floor,
        weakest_accepted: if b.weakest_accepted.is_finite() {
            b.weakest_accepted
        } else {
            0.0
        },
        hilbert_dim: d,
        tol,
        basis: b.basis,
        coords: b.coords,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{PauliString, SystemBasisOp};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn su2_from_x_and_y() {
        let x = StructuredOperator::accessor(1, 1, "X".parse().unwrap(), c(1.0)).unwrap();
        let y = StructuredOperator::accessor(1, 1, "Y".parse().unwrap(), c(1.0)).unwrap();
        let res = lie_closure(&[x, y], DEFAULT_TOL).unwrap();
        assert_eq!(res.dimension, 3);
        assert!(res.controllable);
    }

    #[test]
    fn basis_is_orthonormal() {
        let x = StructuredOperator::system(3, 0, SystemBasisOp::x(1), c(1.0)).unwrap();
        let y = StructuredOperator::system(3, 0, SystemBasisOp::y(2), c(1.0)).unwrap();
        let res = lie_closure(&[x, y], DEFAULT_TOL).unwrap();
        let q = res.coordinates();
        let gram = q.tr_mul(&q);
        let id = DMatrix::<f64>::identity(res.dimension, res.dimension);
        assert!((gram - id).abs().max() < 1e-10);
        for b in res.basis() {
            assert!((b + b.adjoint()).norm() < 1e-12);
        }
    }

    #[test]
    fn non_hermitian_hamiltonian_is_contract_violation() {
        let e = StructuredOperator::system(2, 0, SystemBasisOp::E(1, 2), c(1.0)).unwrap();
        assert!(matches!(lie_closure(&[e], DEFAULT_TOL), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn zero_candidate_is_member() {
        let x = StructuredOperator::accessor(1, 1, "X".parse().unwrap(), c(1.0)).unwrap();
        let res = lie_closure(&[x], DEFAULT_TOL).unwrap();
        assert_eq!(res.dimension, 1);
        let zero = StructuredOperator::zero(1, 1);
        assert!(membership(&zero, &res, 1e-9).unwrap().member);
        let iz = StructuredOperator::accessor(1, 1, "Z".parse::<PauliString>().unwrap(), Complex64::new(0.0, 1.0)).unwrap();
        assert!(!membership(&iz, &res, 1e-9).unwrap().member);
    }

    #[test]
    fn compact_embedding_round_trips() {
        let h = StructuredOperator::term(2, 1, SystemBasisOp::y(1), "X".parse().unwrap(), c(0.7)).unwrap();
        let a = h.to_dense_default() * I;
        let v = compact(&a);
        assert!((v.norm() - a.norm()).abs() < 1e-12);
        assert!((expand(&v, 4) - &a).norm() < 1e-12);
    }
}
