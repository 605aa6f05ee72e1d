use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{format_rational, rational_to_f64, Coeff, Exact, PauliString, StructuredOperator, SystemBasisOp};
use crate::closure::{dense, exact};
use crate::error::Result;

use super::control::ControlModel;
use super::hamiltonian::drift_parts;
use super::linalg;

/// Absolute tolerance for "≠ 0" on model constants in floating mode.
pub const ZERO_TOL: f64 = 1e-12;

/// Relative pivot tolerance for the floating coupling-matrix rank.
pub const RANK_TOL: f64 = 1e-10;

/// Largest number of row subsets searched exhaustively for the witness.
const MAX_WITNESS_SUBSETS: u64 = 50_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    /// Exact rational arithmetic.
    Exact,
    /// `f64` with the documented tolerances.
    #[default]
    Floating,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition1 {
    pub holds: bool,
    /// 1-based indices `j` with `c_j = 0`.
    pub zero_indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition2Witness {
    /// Accessor strings labelling the chosen rows.
    pub rows: Vec<String>,
    pub determinant: f64,
    /// Present in exact mode.
    pub determinant_exact: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition2 {
    pub holds: bool,
    pub rank: usize,
    pub required_rank: usize,
    /// `2^M`, the number of rows of the full coupling matrix.
    pub matrix_rows: u64,
    pub dimension_bound_ok: bool,
    pub witness: Option<Condition2Witness>,
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition3Method {
    #[serde(rename = "explicit-N2")]
    ExplicitN2,
    #[serde(rename = "explicit-N3")]
    ExplicitN3,
    #[serde(rename = "subalgebra-membership")]
    SubalgebraMembership,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExplicitBranch {
    /// Unequal squared gaps.
    UnequalGaps,
    /// Equal gaps `Δ21 = Δ32`.
    EqualGaps,
    /// `E_1 = E_3`: `d_2|1⟩ − d_1|3⟩` is a joint eigenvector of `H_S` and `H_S′`.
    MirrorDegenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitN3 {
    pub holds: bool,
    pub branch: ExplicitBranch,
    pub delta21: String,
    pub delta32: String,
    /// Verdict of the squared-gap formulas without the mirror guard.
    pub squared_gap_formula: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubalgebraMembership {
    pub holds: bool,
    /// Dimension of the algebra generated by `iH_S` and `iH_S′`.
    pub algebra_dim: usize,
    /// `N² − 1`
    pub system_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition3 {
    pub holds: bool,
    pub method: Condition3Method,
    pub detail: String,
    pub explicit: Option<ExplicitN3>,
    pub membership: Option<SubalgebraMembership>,
    /// For N = 3: whether the explicit and membership methods agree.
    pub agreement: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub cond1: Condition1,
    pub cond2: Condition2,
    pub cond3: Condition3,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.cond1.holds && self.cond2.holds && self.cond3.holds
    }
}

fn nonzero(x: &BigRational, mode: Arithmetic) -> bool {
    match mode {
        Arithmetic::Exact => !x.is_zero(),
        Arithmetic::Floating => rational_to_f64(x).abs() > ZERO_TOL,
    }
}

fn equal(a: &BigRational, b: &BigRational, mode: Arithmetic) -> bool {
    match mode {
        Arithmetic::Exact => a == b,
        Arithmetic::Floating => (rational_to_f64(a) - rational_to_f64(b)).abs() <= ZERO_TOL,
    }
}

pub fn check_condition1(model: &ControlModel, mode: Arithmetic) -> Condition1 {
    let zero_indices: Vec<usize> = model
        .chain()
        .iter()
        .enumerate()
        .filter(|(_, c)| !nonzero(c, mode))
        .map(|(j, _)| j + 1)
        .collect();
    Condition1 {
        holds: zero_indices.is_empty(),
        zero_indices,
    }
}

/// Nonzero rows of the `2^M × 2(N−1)` coupling matrix, keyed by accessor
/// string in lexicographic (X < Y) order. Columns run `1(1) … (N−1)(1),
/// 1(2) … (N−1)(2)`; repeated table entries add.
pub fn coupling_matrix(model: &ControlModel) -> Vec<(PauliString, Vec<BigRational>)> {
    let width = 2 * (model.n() - 1);
    let mut rows: std::collections::BTreeMap<String, (PauliString, Vec<BigRational>)> = Default::default();
    for cp in model.couplings() {
        let col = (cp.k as usize - 1) * (model.n() - 1) + (cp.j - 1);
        // X < Y lexicographically matches the string order of the labels.
        let entry = rows
            .entry(cp.alpha.to_string())
            .or_insert_with(|| (cp.alpha, vec![BigRational::zero(); width]));
        entry.1[col] += &cp.g;
    }
    rows.into_values()
        .filter(|(_, r)| r.iter().any(|v| !v.is_zero()))
        .collect()
}

fn binomial(n: u64, k: u64) -> u64 {
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u64::MAX,
        };
    }
    acc
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub fn check_condition2(model: &ControlModel, mode: Arithmetic) -> Condition2 {
    let required = 2 * (model.n() - 1);
    let matrix_rows = 1u64 << model.m();
    if matrix_rows < required as u64 {
        return Condition2 {
            holds: false,
            rank: 0,
            required_rank: required,
            matrix_rows,
            dimension_bound_ok: false,
            witness: None,
            note: Some(format!("dimension bound violated: 2^M = {matrix_rows} < 2(N-1) = {required}")),
        };
    }
    let rows = coupling_matrix(model);
    let exact_rows: Vec<Vec<BigRational>> = rows.iter().map(|(_, r)| r.clone()).collect();
    let float_rows: Vec<Vec<f64>> = exact_rows
        .iter()
        .map(|r| r.iter().map(rational_to_f64).collect())
        .collect();
    let rank = match mode {
        Arithmetic::Exact => linalg::rank_exact(&exact_rows),
        Arithmetic::Floating => linalg::rank_f64(&float_rows, RANK_TOL),
    };
    let holds = rank == required;
    let witness = holds.then(|| {
        let picked = max_volume_rows(&exact_rows, &float_rows, required, mode);
        let sub_exact: Vec<Vec<BigRational>> = picked.iter().map(|&i| exact_rows[i].clone()).collect();
        let sub_float: Vec<Vec<f64>> = picked.iter().map(|&i| float_rows[i].clone()).collect();
        let (determinant, determinant_exact) = match mode {
            Arithmetic::Exact => {
                let det = linalg::det_exact(&sub_exact);
                (rational_to_f64(&det), Some(format_rational(&det)))
            }
            Arithmetic::Floating => (linalg::det_f64(&sub_float), None),
        };
        Condition2Witness {
            rows: picked.iter().map(|&i| rows[i].0.to_string()).collect(),
            determinant,
            determinant_exact,
        }
    });
    Condition2 {
        holds,
        rank,
        required_rank: required,
        matrix_rows,
        dimension_bound_ok: true,
        witness,
        note: None,
    }
}

/// Row subset with the largest `|det|`, rows kept in matrix order. Falls back
/// to the elimination pivots when the subset count is too large to search.
fn max_volume_rows(exact: &[Vec<BigRational>], float: &[Vec<f64>], k: usize, mode: Arithmetic) -> Vec<usize> {
    let n = exact.len();
    if binomial(n as u64, k as u64) > MAX_WITNESS_SUBSETS {
        let mut p = linalg::pivot_rows_exact(exact);
        p.sort_unstable();
        return p;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best = idx.clone();
    match mode {
        Arithmetic::Exact => {
            let mut best_val = BigRational::zero();
            loop {
                let sub: Vec<Vec<BigRational>> = idx.iter().map(|&i| exact[i].clone()).collect();
                let v = linalg::det_exact(&sub).abs();
                if v > best_val {
                    best_val = v;
                    best = idx.clone();
                }
                if !next_combination(&mut idx, n) {
                    break;
                }
            }
        }
        Arithmetic::Floating => {
            let mut best_val = 0.0;
            loop {
                let sub: Vec<Vec<f64>> = idx.iter().map(|&i| float[i].clone()).collect();
                let v = linalg::det_f64(&sub).abs();
                if v > best_val {
                    best_val = v;
                    best = idx.clone();
                }
                if !next_combination(&mut idx, n) {
                    break;
                }
            }
        }
    }
    best
}

/// Explicit three-level test on the gaps `Δ21 = E_2 − E_1`, `Δ32 = E_3 − E_2`.
pub fn explicit_condition3_n3(energies: &[BigRational], d: &[BigRational], mode: Arithmetic) -> ExplicitN3 {
    let delta21 = &energies[1] - &energies[0];
    let delta32 = &energies[2] - &energies[1];
    let (d1, d2) = (&d[0], &d[1]);
    let both = nonzero(d1, mode) && nonzero(d2, mode);
    let sq_equal = equal(&(&delta21 * &delta21), &(&delta32 * &delta32), mode);
    let squared_gap_formula = if sq_equal {
        both && !equal(d1, d2, mode) && !equal(d1, &-d2, mode)
    } else {
        both
    };
    let (branch, holds) = if !sq_equal {
        (ExplicitBranch::UnequalGaps, squared_gap_formula)
    } else if equal(&delta21, &-&delta32, mode) {
        (ExplicitBranch::MirrorDegenerate, false)
    } else {
        (ExplicitBranch::EqualGaps, squared_gap_formula)
    };
    ExplicitN3 {
        holds,
        branch,
        delta21: format_rational(&delta21),
        delta32: format_rational(&delta32),
        squared_gap_formula,
    }
}

/// Closure of `{iH_S, iH_S′}` on the bare system, then membership of every
/// `ix_j`, `iy_j`.
pub fn subalgebra_membership(model: &ControlModel, mode: Arithmetic) -> Result<SubalgebraMembership> {
    let n = model.n();
    let system_only = |op: &StructuredOperator<Exact>| {
        let terms = op.terms().map(|(u, _, c)| (u, PauliString::identity(0), c.clone()));
        StructuredOperator::from_raw_terms(n, 0, terms)
    };
    let parts = drift_parts::<Exact>(model);
    let hs = system_only(&parts.system)?;
    let hx = system_only(&parts.excitation)?;
    let gens: Vec<_> = [hs, hx].into_iter().filter(|g| !g.is_zero()).collect();
    let targets: Vec<StructuredOperator<Exact>> = (1..n)
        .flat_map(|j| [SystemBasisOp::x(j), SystemBasisOp::y(j)])
        .map(|op| StructuredOperator::system(n, 0, op, Exact::imag_unit()).expect("valid index"))
        .collect();
    let system_dim = n * n - 1;
    if gens.is_empty() {
        return Ok(SubalgebraMembership {
            holds: false,
            algebra_dim: 0,
            system_dim,
        });
    }
    match mode {
        Arithmetic::Exact => {
            let closure = exact::lie_closure_exact(&gens)?;
            let mut holds = true;
            for t in &targets {
                holds &= closure.contains(t)?;
            }
            Ok(SubalgebraMembership {
                holds,
                algebra_dim: closure.dimension,
                system_dim,
            })
        }
        Arithmetic::Floating => {
            let float: Vec<_> = gens.iter().map(|g| g.to_floating()).collect();
            let closure = dense::lie_closure(&float, dense::DEFAULT_TOL)?;
            let mut holds = true;
            for t in &targets {
                holds &= dense::membership(&t.to_floating(), &closure, 1e-8)?.member;
            }
            Ok(SubalgebraMembership {
                holds,
                algebra_dim: closure.dimension,
                system_dim,
            })
        }
    }
}

pub fn check_condition3(model: &ControlModel, mode: Arithmetic) -> Result<Condition3> {
    match model.n() {
        2 => {
            let holds = nonzero(&model.excitation()[0], mode);
            Ok(Condition3 {
                holds,
                method: Condition3Method::ExplicitN2,
                detail: format!("d1 {} 0", if holds { "!=" } else { "==" }),
                explicit: None,
                membership: None,
                agreement: None,
            })
        }
        3 => {
            let explicit = explicit_condition3_n3(model.energies(), model.excitation(), mode);
            let membership = subalgebra_membership(model, mode)?;
            let agreement = explicit.holds == membership.holds;
            let mut detail = match explicit.branch {
                ExplicitBranch::UnequalGaps => "unequal squared gaps; requires d1, d2 != 0".to_string(),
                ExplicitBranch::EqualGaps => "equal gaps; requires d1 != ±d2, both nonzero".to_string(),
                ExplicitBranch::MirrorDegenerate => {
                    "E1 == E3: d2|1> - d1|3> is a joint eigenvector of H_S and H_S'".to_string()
                }
            };
            if !agreement {
                detail.push_str("; explicit and membership methods disagree, membership verdict used");
            }
            Ok(Condition3 {
                holds: membership.holds,
                method: Condition3Method::ExplicitN3,
                detail,
                explicit: Some(explicit),
                membership: Some(membership),
                agreement: Some(agreement),
            })
        }
        _ => {
            let membership = subalgebra_membership(model, mode)?;
            Ok(Condition3 {
                holds: membership.holds,
                method: Condition3Method::SubalgebraMembership,
                detail: format!(
                    "closure of iH_S, iH_S' has dimension {} of {}",
                    membership.algebra_dim, membership.system_dim
                ),
                explicit: None,
                membership: Some(membership),
                agreement: None,
            })
        }
    }
}

pub fn check_conditions(model: &ControlModel, mode: Arithmetic) -> Result<ConditionReport> {
    Ok(ConditionReport {
        cond1: check_condition1(model, mode),
        cond2: check_condition2(model, mode),
        cond3: check_condition3(model, mode)?,
    })
}

/// `E_1 + … + E_j`, the `h_j` coefficient of `H_S`.
pub fn partial_energy(model: &ControlModel, j: usize) -> BigRational {
    model.energies()[..j].iter().fold(BigRational::from_integer(BigInt::zero()), |a, b| a + b)
}
