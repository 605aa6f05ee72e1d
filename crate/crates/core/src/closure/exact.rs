//! Lie closure in exact Gaussian-rational arithmetic.
//!
//! The algebra generated by a set S is the span of S together with all
//! left-normed brackets `[s_1, [s_2, … [s_k, s]…]]`. A subspace that contains S
//! and is invariant under `ad_s` for every `s ∈ S` is therefore the whole
//! algebra, so it suffices to bracket each accepted element with the
//! generators. Independence is decided by a sparse rational echelon form,
//! so no tolerance is involved.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{Coeff, Exact, StructuredOperator};
use crate::error::{Error, Result};

type SparseVec = Vec<(u64, BigRational)>;

/// Real coordinates of a skew-Hermitian operator: `(Re, Im)` of every
/// upper-triangular unit coefficient and `Im` of every diagonal one.
fn coordinates(op: &StructuredOperator<Exact>) -> SparseVec {
    let n = op.system_dim() as u64;
    let mut out: SparseVec = Vec::new();
    for (u, p, c) in op.terms() {
        let (j, k) = (u.row as u64 - 1, u.col as u64 - 1);
        if j > k {
            continue;
        }
        let base = ((p.code() * n + j) * n + k) * 2;
        if j < k && !c.re.is_zero() {
            out.push((base, c.re.clone()));
        }
        if !c.im.is_zero() {
            out.push((base + 1, c.im.clone()));
        }
    }
    out.sort_by_key(|&(k, _)| k);
    out
}

/// `v − s·row`
fn sub_scaled(v: &SparseVec, s: &BigRational, row: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(v.len() + row.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < row.len() {
        let take_v = j >= row.len() || (i < v.len() && v[i].0 < row[j].0);
        let take_row = i >= v.len() || (j < row.len() && row[j].0 < v[i].0);
        if take_v {
            out.push(v[i].clone());
            i += 1;
        } else if take_row {
            out.push((row[j].0, -(s * &row[j].1)));
            j += 1;
        } else {
            let val = &v[i].1 - s * &row[j].1;
            if !val.is_zero() {
                out.push((v[i].0, val));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

#[derive(Clone, Debug, Default)]
struct Echelon {
    rows: Vec<SparseVec>,
    pivots: HashMap<u64, usize>,
}

impl Echelon {
    /// Eliminates leading entries that hit existing pivots. The result is zero
    /// iff `v` lies in the span.
    fn reduce(&self, mut v: SparseVec) -> SparseVec {
        while let Some((lead, c)) = v.first().cloned() {
            match self.pivots.get(&lead) {
                Some(&r) => v = sub_scaled(&v, &c, &self.rows[r]),
                None => break,
            }
        }
        v
    }

    fn insert(&mut self, v: SparseVec) {
        let (lead, c) = v[0].clone();
        let inv = BigRational::one() / c;
        let row: SparseVec = v.into_iter().map(|(k, x)| (k, x * &inv)).collect();
        self.pivots.insert(lead, self.rows.len());
        self.rows.push(row);
    }

    fn len(&self) -> usize {
        self.rows.len()
    }
}

/// Exact closure: a spanning set of nested brackets and its dimension.
#[derive(Clone, Debug)]
pub struct ExactClosure {
    pub dimension: usize,
    pub expected_dim: usize,
    pub controllable: bool,
    elements: Vec<StructuredOperator<Exact>>,
    echelon: Echelon,
}

impl ExactClosure {
    /// Linearly independent skew-Hermitian elements spanning the algebra.
    pub fn elements(&self) -> &[StructuredOperator<Exact>] {
        &self.elements
    }

    /// Exact membership of a skew-Hermitian operator.
    pub fn contains(&self, candidate: &StructuredOperator<Exact>) -> Result<bool> {
        if let Some(e) = self.elements.first() {
            if e.system_dim() != candidate.system_dim() || e.accessor_len() != candidate.accessor_len() {
                return Err(Error::Dimension("candidate on a different space".into()));
            }
        }
        if !candidate.is_skew_hermitian() {
            return Err(Error::ContractViolation("membership candidate is not skew-Hermitian".into()));
        }
        Ok(self.echelon.reduce(coordinates(candidate)).is_empty())
    }
}

/// Exact Lie closure of `{i·H : H ∈ hamiltonians}`; stops early at `dim su(d)`.
pub fn lie_closure_exact(hamiltonians: &[StructuredOperator<Exact>]) -> Result<ExactClosure> {
    let Some(first) = hamiltonians.first() else {
        return Err(Error::Input("lie_closure needs at least one generator".into()));
    };
    let (n, m) = (first.system_dim(), first.accessor_len());
    let d = first.hilbert_dim();
    let expected = d * d - 1;
    let i = Exact::imag_unit();

    let mut echelon = Echelon::default();
    let mut elements = Vec::new();
    let mut generators = Vec::new();
    for (idx, h) in hamiltonians.iter().enumerate() {
        if h.system_dim() != n || h.accessor_len() != m {
            return Err(Error::Dimension("generators on different spaces".into()));
        }
        if !h.is_hermitian() {
            return Err(Error::ContractViolation(format!("generator {idx} is not Hermitian")));
        }
        let g = h.scale(&i);
        let r = echelon.reduce(coordinates(&g));
        if !r.is_empty() {
            echelon.insert(r);
            elements.push(g.clone());
            generators.push(g);
        }
    }

    let mut next = 0;
    'outer: while next < elements.len() && echelon.len() < expected {
        let u = elements[next].clone();
        next += 1;
        for g in &generators {
            let cand = g.commutator(&u)?;
            if cand.is_zero() {
                continue;
            }
            let r = echelon.reduce(coordinates(&cand));
            if !r.is_empty() {
                echelon.insert(r);
                elements.push(cand);
                if echelon.len() >= expected {
                    break 'outer;
                }
            }
        }
    }

    let dimension = echelon.len();
    Ok(ExactClosure {
        dimension,
        expected_dim: expected,
        controllable: dimension == expected,
        elements,
        echelon,
    })
}

/// Real dimension of the span of skew-Hermitian operators.
pub fn exact_rank(ops: &[StructuredOperator<Exact>]) -> usize {
    let mut echelon = Echelon::default();
    for op in ops {
        let r = echelon.reduce(coordinates(op));
        if !r.is_empty() {
            echelon.insert(r);
        }
    }
    echelon.len()
}
