use serde::{Deserialize, Serialize};

use crate::algebra::Exact;
use crate::error::{Error, Result};
use crate::model::{build_controls, build_drift, check_conditions, Arithmetic, ConditionReport, ControlModel, ExplicitBranch};

use super::dense::{lie_closure, ClosureResult, DEFAULT_TOL};
use super::exact::{lie_closure_exact, ExactClosure};
use super::sp4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisOptions {
    pub mode: Arithmetic,
    /// Relative acceptance threshold of the floating closure.
    pub tol: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            mode: Arithmetic::Floating,
            tol: DEFAULT_TOL,
        }
    }
}

/// Closure statistics shared by both arithmetic modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureSummary {
    pub method: Arithmetic,
    pub dimension: usize,
    pub expected_dim: usize,
    pub controllable: bool,
    /// Breadth-first sweeps (floating) or bracketed elements (exact).
    pub iterations: usize,
    /// Largest rejected relative residual; zero in exact mode.
    pub residual_floor: f64,
    /// `None` unless the ambient space is 4-dimensional.
    pub sp4_certificate: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct ControllabilityVerdict {
    pub conditions: ConditionReport,
    pub closure: ClosureSummary,
    pub warnings: Vec<String>,
    floating: Option<ClosureResult>,
    exact: Option<ExactClosure>,
}

impl ControllabilityVerdict {
    pub fn controllable(&self) -> bool {
        self.closure.controllable
    }

    pub fn floating_closure(&self) -> Option<&ClosureResult> {
        self.floating.as_ref()
    }

    pub fn exact_closure(&self) -> Option<&ExactClosure> {
        self.exact.as_ref()
    }
}

/// Warnings that depend only on the model and its condition verdicts.
pub fn condition_warnings(model: &ControlModel, conditions: &ConditionReport) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(ex) = &conditions.cond3.explicit {
        if ex.branch == ExplicitBranch::MirrorDegenerate && ex.squared_gap_formula {
            out.push(
                "condition 3: E1 == E3, the squared-gap formula alone reports true but d2|1> - d1|3> \
                 is a joint eigenvector of H_S and H_S'; verdict set to false"
                    .to_string(),
            );
        }
    }
    if conditions.cond3.agreement == Some(false) {
        out.push("condition 3: explicit formula and subalgebra membership disagree".to_string());
    }
    if model.m() <= 2 && conditions.all_hold() {
        out.push(format!(
            "conditions 1-3 are sufficient only for M > 2; with M = {} the verdict rests on the closure alone",
            model.m()
        ));
    }
    if model.n() == 3 && model.m() == 2 {
        out.push(
            "N = 3, M = 2: the ambient space is 12-dimensional, so complete controllability means su(12) \
             (dimension 143), not su(4)"
                .to_string(),
        );
    }
    out
}

/// Conditions 1–3 plus the Lie closure of `{iH_0} ∪ {i·controls}`.
pub fn full_controllability(model: &ControlModel, opts: &AnalysisOptions) -> Result<ControllabilityVerdict> {
    let conditions = check_conditions(model, opts.mode)?;
    let mut warnings = condition_warnings(model, &conditions);

    let (closure, floating, exact) = match opts.mode {
        Arithmetic::Floating => {
            let mut gens = vec![build_drift(model)];
            gens.extend(build_controls(model));
            let res = lie_closure(&gens, opts.tol)?;
            let sp4_certificate = if res.hilbert_dim == 4 {
                Some(sp4::check_sp4(&res)?)
            } else {
                None
            };
            let summary = ClosureSummary {
                method: Arithmetic::Floating,
                dimension: res.dimension,
                expected_dim: res.expected_dim,
                controllable: res.controllable,
                iterations: res.iterations,
                residual_floor: res.residual_floor,
                sp4_certificate,
            };
            (summary, Some(res), None)
        }
        Arithmetic::Exact => {
            let mut gens = vec![build_drift::<Exact>(model)];
            gens.extend(build_controls::<Exact>(model));
            let res = lie_closure_exact(&gens)?;
            let sp4_certificate = if model.hilbert_dim() == 4 {
                let mut ok = true;
                for e in res.elements() {
                    ok &= sp4::sp4_defect(&e.to_dense_default())? <= sp4::SP4_TOL;
                }
                Some(ok)
            } else {
                None
            };
            let summary = ClosureSummary {
                method: Arithmetic::Exact,
                dimension: res.dimension,
                expected_dim: res.expected_dim,
                controllable: res.controllable,
                iterations: res.elements().len(),
                residual_floor: 0.0,
                sp4_certificate,
            };
            (summary, None, Some(res))
        }
    };

    if conditions.all_hold() && model.m() > 2 && !closure.controllable {
        return Err(Error::ContractViolation(format!(
            "conditions 1-3 hold with M = {} but the closure has dimension {} < {}",
            model.m(),
            closure.dimension,
            closure.expected_dim
        )));
    }
    if !closure.controllable {
        warnings.push(format!(
            "not completely controllable: closure dimension {} of {}",
            closure.dimension, closure.expected_dim
        ));
    }

    Ok(ControllabilityVerdict {
        conditions,
        closure,
        warnings,
        floating,
        exact,
    })
}
