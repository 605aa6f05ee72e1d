use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::pauli::PauliString;
use super::scalar::{Coeff, Exact};
use super::system::{SystemBasisOp, Unit};
use crate::error::{Error, Result};

/// Finite sum `Σ c · e_jk ⊗ σ_[α]` on `C^N ⊗ (C^2)^⊗M`.
///
/// Terms are kept canonical: system parts are raw matrix units, keys are
/// unique and no stored coefficient is zero. Values are immutable once built;
/// every operation returns a fresh operator.
#[derive(Clone, PartialEq)]
pub struct StructuredOperator<C: Coeff = Complex64> {
    n: usize,
    m: usize,
    terms: BTreeMap<(Unit, PauliString), C>,
}

/// Chevalley-form label used when reassembling raw units for display.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ChevalleyLabel {
    Identity,
    H(usize),
    X(usize, usize),
    Y(usize, usize),
}

impl fmt::Display for ChevalleyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ChevalleyLabel::Identity => write!(f, "1"),
            ChevalleyLabel::H(j) => write!(f, "h{j}"),
            ChevalleyLabel::X(j, k) if k == j + 1 => write!(f, "x{j}"),
            ChevalleyLabel::Y(j, k) if k == j + 1 => write!(f, "y{j}"),
            ChevalleyLabel::X(j, k) => write!(f, "x{j},{k}"),
            ChevalleyLabel::Y(j, k) => write!(f, "y{j},{k}"),
        }
    }
}

impl<C: Coeff> StructuredOperator<C> {
    pub fn zero(n: usize, m: usize) -> Self {
        StructuredOperator {
            n,
            m,
            terms: BTreeMap::new(),
        }
    }

    /// `coeff · sys ⊗ pauli`.
    pub fn term(n: usize, m: usize, sys: SystemBasisOp, pauli: PauliString, coeff: C) -> Result<Self> {
        if pauli.len() != m {
            return Err(Error::Dimension(format!(
                "Pauli string {pauli} has length {}, accessor has {m} qubits",
                pauli.len()
            )));
        }
        let mut op = Self::zero(n, m);
        for (unit, c) in sys.expand::<C>(n)? {
            op.accumulate(unit, pauli, c * coeff.clone());
        }
        Ok(op)
    }

    /// `coeff · 1_S ⊗ pauli`.
    pub fn accessor(n: usize, m: usize, pauli: PauliString, coeff: C) -> Result<Self> {
        Self::term(n, m, SystemBasisOp::Identity, pauli, coeff)
    }

    /// `coeff · sys ⊗ 1_A`.
    pub fn system(n: usize, m: usize, sys: SystemBasisOp, coeff: C) -> Result<Self> {
        Self::term(n, m, sys, PauliString::identity(m), coeff)
    }

    pub fn identity(n: usize, m: usize) -> Self {
        Self::system(n, m, SystemBasisOp::Identity, C::one()).expect("identity is always in range")
    }

    pub fn from_raw_terms(
        n: usize,
        m: usize,
        terms: impl IntoIterator<Item = (Unit, PauliString, C)>,
    ) -> Result<Self> {
        let mut op = Self::zero(n, m);
        for (unit, pauli, c) in terms {
            SystemBasisOp::E(unit.row as usize, unit.col as usize).validate(n)?;
            if pauli.len() != m {
                return Err(Error::Dimension(format!("Pauli string {pauli} in M={m} operator")));
            }
            op.accumulate(unit, pauli, c);
        }
        Ok(op)
    }

    fn accumulate(&mut self, unit: Unit, pauli: PauliString, c: C) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((unit, pauli)) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn system_dim(&self) -> usize {
        self.n
    }

    pub fn accessor_len(&self) -> usize {
        self.m
    }

    /// Dimension of the full Hilbert space, `2^M · N`.
    pub fn hilbert_dim(&self) -> usize {
        self.n << self.m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Unit, PauliString, &C)> {
        self.terms.iter().map(|(&(u, p), c)| (u, p, c))
    }

    pub fn coeff(&self, unit: Unit, pauli: PauliString) -> C {
        self.terms.get(&(unit, pauli)).cloned().unwrap_or_else(C::zero)
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.m != other.m {
            return Err(Error::Dimension(format!(
                "operators on (N={}, M={}) and (N={}, M={})",
                self.n, self.m, other.n, other.m
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let mut out = self.clone();
        for (&(u, p), c) in &other.terms {
            out.accumulate(u, p, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.n, self.m);
        if c.is_zero() {
            return out;
        }
        for (&(u, p), v) in &self.terms {
            out.accumulate(u, p, v.clone() * c.clone());
        }
        out
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> StructuredOperator<D> {
        let mut out = StructuredOperator::<D>::zero(self.n, self.m);
        for (&(u, p), c) in &self.terms {
            out.accumulate(u, p, f(c));
        }
        out
    }

    pub fn to_floating(&self) -> StructuredOperator<Complex64> {
        self.map_coeffs(|c| c.to_c64())
    }

    /// Operator product `self · other`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        Ok(self.product_unchecked(other))
    }

    fn product_unchecked(&self, other: &Self) -> Self {
        // Index the right factor by row so only matching e_ab·e_bd pairs are visited.
        let mut by_row: BTreeMap<u16, Vec<(Unit, PauliString, &C)>> = BTreeMap::new();
        for (&(u, p), c) in &other.terms {
            by_row.entry(u.row).or_default().push((u, p, c));
        }
        let mut out = Self::zero(self.n, self.m);
        for (&(ua, pa), ca) in &self.terms {
            let Some(right) = by_row.get(&ua.col) else {
                continue;
            };
            for &(ub, pb, cb) in right {
                let (phase, prod) = pa.multiply_unchecked(&pb);
                let c = ca.clone() * cb.clone() * phase.to_coeff::<C>();
                out.accumulate(Unit { row: ua.row, col: ub.col }, prod, c);
            }
        }
        out
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let mut out = self.product_unchecked(other);
        for (&(u, p), c) in &other.product_unchecked(self).terms {
            out.accumulate(u, p, -c.clone());
        }
        Ok(out)
    }

    /// Hermitian adjoint.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.n, self.m);
        for (&(u, p), c) in &self.terms {
            out.accumulate(Unit { row: u.col, col: u.row }, p, c.conj());
        }
        out
    }

    /// Trace over the full space.
    pub fn trace(&self) -> C {
        let dim_a = C::from_i64(1i64 << self.m);
        let mut t = C::zero();
        for (&(u, p), c) in &self.terms {
            if u.row == u.col && p.is_identity() {
                t = t + c.clone() * dim_a.clone();
            }
        }
        t
    }

    /// Hilbert–Schmidt inner product `tr(A† B)`, evaluated term-wise.
    pub fn hs_inner(&self, other: &Self) -> Result<C> {
        self.check_ambient(other)?;
        let mut acc = C::zero();
        for (key, a) in &self.terms {
            if let Some(b) = other.terms.get(key) {
                acc = acc + a.conj() * b.clone();
            }
        }
        Ok(acc * C::from_i64(1i64 << self.m))
    }

    /// `self` is Hermitian when it equals its adjoint exactly.
    pub fn is_hermitian(&self) -> bool {
        *self == self.adjoint()
    }

    pub fn is_skew_hermitian(&self) -> bool {
        *self == -self.adjoint()
    }

    /// Regroups raw units into `x_jk`, `y_jk`, `h_j` and identity components
    /// per Pauli string.
    pub fn chevalley_terms(&self) -> Vec<(ChevalleyLabel, PauliString, C)> {
        let mut by_pauli: BTreeMap<PauliString, BTreeMap<Unit, C>> = BTreeMap::new();
        for (&(u, p), c) in &self.terms {
            by_pauli.entry(p).or_default().insert(u, c.clone());
        }
        let half = C::one() / C::from_i64(2);
        let n = self.n;
        let mut out = Vec::new();
        for (p, units) in by_pauli {
            let get = |j: usize, k: usize| units.get(&Unit::new(j, k)).cloned().unwrap_or_else(C::zero);
            let diag: Vec<C> = (1..=n).map(|j| get(j, j)).collect();
            let mean = diag.iter().cloned().fold(C::zero(), |a, b| a + b) / C::from_i64(n as i64);
            if !mean.is_zero() {
                out.push((ChevalleyLabel::Identity, p, mean.clone()));
            }
            let mut partial = C::zero();
            for (j, d) in diag.iter().enumerate().take(n - 1) {
                partial = partial + d.clone() - mean.clone();
                if !partial.is_zero() {
                    out.push((ChevalleyLabel::H(j + 1), p, partial.clone()));
                }
            }
            for j in 1..=n {
                for k in j + 1..=n {
                    let (a, b) = (get(j, k), get(k, j));
                    let xc = (a.clone() + b.clone()) * half.clone();
                    let yc = (a - b) * half.clone() / C::imag_unit();
                    if !xc.is_zero() {
                        out.push((ChevalleyLabel::X(j, k), p, xc));
                    }
                    if !yc.is_zero() {
                        out.push((ChevalleyLabel::Y(j, k), p, yc));
                    }
                }
            }
        }
        out
    }
}

impl StructuredOperator<Exact> {
    /// Lift a floating operator to exact dyadic rationals. Fails on non-finite
    /// coefficients.
    pub fn from_floating(op: &StructuredOperator<Complex64>) -> Result<Self> {
        use super::scalar::rational_from_f64;
        let mut out = Self::zero(op.n, op.m);
        for (&(u, p), c) in &op.terms {
            let re = rational_from_f64(c.re).ok_or_else(|| Error::Input(format!("non-finite {c}")))?;
            let im = rational_from_f64(c.im).ok_or_else(|| Error::Input(format!("non-finite {c}")))?;
            out.accumulate(u, p, Exact::new(re, im));
        }
        Ok(out)
    }
}

impl StructuredOperator<Complex64> {
    /// Frobenius norm `sqrt(tr(A†A))`.
    pub fn norm(&self) -> f64 {
        let s: f64 = self.terms.values().map(|c| c.norm_sqr()).sum();
        (s * (1u64 << self.m) as f64).sqrt()
    }

    /// Drops terms whose magnitude falls at or below `tol`.
    pub fn prune(&self, tol: f64) -> Self {
        let mut out = Self::zero(self.n, self.m);
        for (&(u, p), c) in &self.terms {
            if c.norm() > tol {
                out.accumulate(u, p, *c);
            }
        }
        out
    }
}

/// `[s_k, [s_{k−1}, … [s_1, target] …]]`, innermost bracket with `s_1`.
pub fn nested_commutator<C: Coeff>(
    sequence: &[StructuredOperator<C>],
    target: &StructuredOperator<C>,
) -> Result<StructuredOperator<C>> {
    sequence
        .iter()
        .try_fold(target.clone(), |acc, s| s.commutator(&acc))
}

impl<C: Coeff> Add for &StructuredOperator<C> {
    type Output = StructuredOperator<C>;

    /// Panics on mismatched ambient dimensions; use
    /// [`StructuredOperator::checked_add`] for a fallible sum.
    fn add(self, rhs: &StructuredOperator<C>) -> StructuredOperator<C> {
        self.checked_add(rhs).expect("ambient dimensions must match")
    }
}

impl<C: Coeff> Add for StructuredOperator<C> {
    type Output = StructuredOperator<C>;
    fn add(self, rhs: StructuredOperator<C>) -> StructuredOperator<C> {
        &self + &rhs
    }
}

impl<C: Coeff> Neg for &StructuredOperator<C> {
    type Output = StructuredOperator<C>;
    fn neg(self) -> StructuredOperator<C> {
        self.scale(&-C::one())
    }
}

impl<C: Coeff> Neg for StructuredOperator<C> {
    type Output = StructuredOperator<C>;
    fn neg(self) -> StructuredOperator<C> {
        -&self
    }
}

impl<C: Coeff> Sub for &StructuredOperator<C> {
    type Output = StructuredOperator<C>;
    fn sub(self, rhs: &StructuredOperator<C>) -> StructuredOperator<C> {
        self + &(-rhs)
    }
}

impl<C: Coeff> Sub for StructuredOperator<C> {
    type Output = StructuredOperator<C>;
    fn sub(self, rhs: StructuredOperator<C>) -> StructuredOperator<C> {
        &self - &rhs
    }
}

impl<C: Coeff> Mul<&C> for &StructuredOperator<C> {
    type Output = StructuredOperator<C>;
    fn mul(self, rhs: &C) -> StructuredOperator<C> {
        self.scale(rhs)
    }
}

impl<C: Coeff> fmt::Display for StructuredOperator<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.chevalley_terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (label, p, c)) in terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}·{}⊗{}", c.display(), label, p)?;
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for StructuredOperator<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StructuredOperator(N={}, M={}; {})", self.n, self.m, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::pauli::Pauli;

    type Op = StructuredOperator<Exact>;

    fn c(re: i64, im: i64) -> Exact {
        Exact::new(Exact::from_i64(re).re, Exact::from_i64(im).re)
    }

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn unit_commutator_gives_h() {
        let a = Op::system(2, 0, SystemBasisOp::E(1, 2), c(1, 0)).unwrap();
        let b = Op::system(2, 0, SystemBasisOp::E(2, 1), c(1, 0)).unwrap();
        let h = Op::system(2, 0, SystemBasisOp::H(1), c(1, 0)).unwrap();
        assert_eq!(a.commutator(&b).unwrap(), h);
    }

    #[test]
    fn pauli_commutator_on_accessor() {
        let x = Op::accessor(2, 1, ps("X"), c(0, 1)).unwrap();
        let y = Op::accessor(2, 1, ps("Y"), c(0, 1)).unwrap();
        let z = Op::accessor(2, 1, ps("Z"), c(0, -2)).unwrap();
        assert_eq!(x.commutator(&y).unwrap(), z);
    }

    #[test]
    fn ambient_mismatch_is_dimension_error() {
        let a = Op::accessor(2, 1, ps("X"), c(1, 0)).unwrap();
        let b = Op::accessor(3, 1, ps("X"), c(1, 0)).unwrap();
        assert!(matches!(a.commutator(&b), Err(Error::Dimension(_))));
        assert!(matches!(a.hs_inner(&b), Err(Error::Dimension(_))));
        assert!(Op::accessor(2, 2, ps("X"), c(1, 0)).is_err());
    }

    #[test]
    fn hs_inner_values() {
        let x = Op::accessor(2, 1, ps("X"), c(1, 0)).unwrap();
        let y = Op::accessor(2, 1, ps("Y"), c(1, 0)).unwrap();
        let ex = Op::term(2, 1, SystemBasisOp::E(1, 2), ps("X"), c(1, 0)).unwrap();
        assert_eq!(x.hs_inner(&x).unwrap(), c(4, 0));
        assert_eq!(x.hs_inner(&y).unwrap(), c(0, 0));
        assert_eq!(ex.hs_inner(&ex).unwrap(), c(2, 0));
        // Conjugate-linear in the first slot.
        let ix = x.scale(&c(0, 1));
        assert_eq!(ix.hs_inner(&x).unwrap(), c(0, -4));
    }

    #[test]
    fn canonical_form_drops_cancellations() {
        let a = Op::system(3, 1, SystemBasisOp::X(1, 2), c(1, 0)).unwrap();
        let b = Op::system(3, 1, SystemBasisOp::E(1, 2), c(-1, 0)).unwrap();
        let sum = &a + &b;
        assert_eq!(sum.num_terms(), 1);
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn chevalley_reassembly() {
        let op = &Op::system(3, 1, SystemBasisOp::H(2), c(2, 0)).unwrap()
            + &Op::term(3, 1, SystemBasisOp::Y(1, 3), ps("Z"), c(-1, 0)).unwrap();
        let terms = op.chevalley_terms();
        assert!(terms.contains(&(ChevalleyLabel::H(2), ps("I"), c(2, 0))));
        assert!(terms.contains(&(ChevalleyLabel::Y(1, 3), ps("Z"), c(-1, 0))));
        assert_eq!(terms.len(), 2);
        assert_eq!(op.to_string(), "2·h2⊗I + -1·y1,3⊗Z");
    }

    #[test]
    fn nested_empty_sequence_is_identity_of_fold() {
        let t = Op::accessor(2, 2, PauliString::pair(2, 1, Pauli::X, Pauli::X), c(0, 1)).unwrap();
        assert_eq!(nested_commutator(&[], &t).unwrap(), t);
    }

    #[test]
    fn trace_and_adjoint() {
        let id = Op::identity(3, 2);
        assert_eq!(id.trace(), c(12, 0));
        let y = Op::system(2, 1, SystemBasisOp::Y(1, 2), c(1, 0)).unwrap();
        assert!(y.is_hermitian());
        assert!(y.scale(&c(0, 1)).is_skew_hermitian());
    }
}
