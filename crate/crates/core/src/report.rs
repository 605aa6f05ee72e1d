//! Command dispatch and the JSON analysis report.

use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algebra::format_rational;
use crate::closure::{
    condition_warnings, full_controllability, verify_lemma_suite, AnalysisOptions, ClosureSummary, IdentityCheck,
    DEFAULT_TOL,
};
use crate::config::{load_config, Config};
use crate::error::{Error, Result};
use crate::model::{check_conditions, Arithmetic, ConditionReport, ControlModel};
use crate::pulse::synthesize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Check,
    Closure,
    VerifyLemmas,
    Synthesize,
    Report,
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "check" => Command::Check,
            "closure" => Command::Closure,
            "verify-lemmas" => Command::VerifyLemmas,
            "synthesize" => Command::Synthesize,
            "report" => Command::Report,
            other => return Err(Error::Input(format!("unknown command `{other}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingEcho {
    pub j: usize,
    pub k: u8,
    pub alpha: String,
    pub g: String,
}

/// The normalized model; rationals are printed exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelEcho {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "E")]
    pub energies: Vec<String>,
    pub omega: Vec<String>,
    pub c: Vec<String>,
    pub d: Vec<String>,
    pub couplings: Vec<CouplingEcho>,
    pub extra_controls: Vec<String>,
}

impl ModelEcho {
    pub fn new(model: &ControlModel) -> Self {
        let fmt = |v: &[num_rational::BigRational]| v.iter().map(format_rational).collect();
        ModelEcho {
            n: model.n(),
            m: model.m(),
            energies: fmt(model.energies()),
            omega: fmt(model.omega()),
            c: fmt(model.chain()),
            d: fmt(model.excitation()),
            couplings: model
                .couplings()
                .iter()
                .map(|cp| CouplingEcho {
                    j: cp.j,
                    k: cp.k,
                    alpha: cp.alpha.to_string(),
                    g: format_rational(&cp.g),
                })
                .collect(),
            extra_controls: model.extra_controls().iter().map(|p| p.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    #[serde(flatten)]
    pub summary: ClosureSummary,
    /// Seconds; `null` under `--no-timing`.
    pub wall_time: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseReport {
    pub seed: u64,
    pub segment_count: usize,
    pub dt: f64,
    pub horizon: f64,
    pub fidelity: f64,
    pub target_fidelity: f64,
    pub converged: bool,
    pub iterations: usize,
    pub channels: Vec<String>,
    /// One row per segment.
    pub amplitudes: Vec<Vec<f64>>,
    pub fidelity_trace: Vec<f64>,
    pub wall_time: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub command: Command,
    pub arithmetic: Arithmetic,
    pub model: ModelEcho,
    pub conditions: Option<ConditionReport>,
    pub closure: Option<ClosureReport>,
    pub lemmas: Option<Vec<IdentityCheck>>,
    pub pulses: Option<PulseReport>,
    pub warnings: Vec<String>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report fields are serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("report: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunFlags {
    pub tol: f64,
    pub seed: u64,
    pub exact: bool,
    pub no_timing: bool,
}

impl Default for RunFlags {
    fn default() -> Self {
        RunFlags {
            tol: DEFAULT_TOL,
            seed: 0,
            exact: false,
            no_timing: false,
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CONTRACT: i32 = 3;
pub const EXIT_UNCONVERGED: i32 = 4;

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::InvalidModel(_) | Error::Io(_) => EXIT_PARSE,
        Error::ContractViolation(_) => EXIT_CONTRACT,
        _ => EXIT_FAILURE,
    }
}

fn elapsed(start: Instant, flags: &RunFlags) -> Option<f64> {
    (!flags.no_timing).then(|| start.elapsed().as_secs_f64())
}

fn push_unique(warnings: &mut Vec<String>, w: String) {
    if !warnings.contains(&w) {
        warnings.push(w);
    }
}

/// Runs `command` on an already parsed configuration.
pub fn analyze(command: Command, config: &Config, flags: &RunFlags) -> Result<AnalysisReport> {
    let model = &config.model;
    let mode = if flags.exact { Arithmetic::Exact } else { Arithmetic::Floating };
    let opts = AnalysisOptions { mode, tol: flags.tol };
    let mut report = AnalysisReport {
        command,
        arithmetic: mode,
        model: ModelEcho::new(model),
        conditions: None,
        closure: None,
        lemmas: None,
        pulses: None,
        warnings: Vec::new(),
    };

    let needs_closure = matches!(command, Command::Closure | Command::Synthesize | Command::Report);
    let mut floating_closure = None;
    if needs_closure {
        let start = Instant::now();
        let verdict = full_controllability(model, &opts)?;
        report.closure = Some(ClosureReport {
            summary: verdict.closure.clone(),
            wall_time: elapsed(start, flags),
        });
        report.conditions = Some(verdict.conditions.clone());
        report.warnings.extend(verdict.warnings.iter().cloned());
        floating_closure = verdict.floating_closure().cloned();
    } else if command == Command::Check || command == Command::VerifyLemmas {
        let conditions = check_conditions(model, mode)?;
        report.warnings = condition_warnings(model, &conditions);
        report.conditions = Some(conditions);
    }

    if matches!(command, Command::VerifyLemmas | Command::Report) {
        let checks = verify_lemma_suite(model, floating_closure.as_ref())?;
        for c in checks.iter().filter(|c| c.status == crate::closure::CheckStatus::Fail) {
            push_unique(&mut report.warnings, format!("identity {} failed: {}", c.id, c.detail));
        }
        report.lemmas = Some(checks);
    }

    if matches!(command, Command::Synthesize | Command::Report) {
        let Some(tc) = &config.task else {
            if command == Command::Report {
                return Ok(report);
            }
            return Err(Error::Parse {
                line: 1,
                key: "task".into(),
                message: "synthesize needs a task block".into(),
            });
        };
        if report.closure.as_ref().is_some_and(|c| !c.summary.controllable) {
            push_unique(
                &mut report.warnings,
                "synthesis requested on a model that is not completely controllable".to_string(),
            );
        }
        let mut options = tc.options.clone();
        options.seed = flags.seed;
        let start = Instant::now();
        let prog = synthesize(model, &tc.task, &options)?;
        if !prog.converged {
            push_unique(
                &mut report.warnings,
                format!(
                    "synthesis unconverged: fidelity {:.6} below target {} after {} iterations",
                    prog.fidelity, options.target_fidelity, prog.iterations
                ),
            );
        }
        report.pulses = Some(PulseReport {
            seed: options.seed,
            segment_count: prog.segment_count,
            dt: prog.dt,
            horizon: prog.horizon(),
            fidelity: prog.fidelity,
            target_fidelity: options.target_fidelity,
            converged: prog.converged,
            iterations: prog.iterations,
            channels: prog.channels,
            amplitudes: prog.amplitudes,
            fidelity_trace: prog.fidelity_trace,
            wall_time: elapsed(start, flags),
        });
    }
    Ok(report)
}

/// Loads the configuration and runs `command`. Returns the report (when the
/// analysis produced one) and the process exit status.
pub fn run(command: Command, config_path: &Path, flags: &RunFlags) -> (Result<AnalysisReport>, i32) {
    let result = load_config(config_path).and_then(|cfg| analyze(command, &cfg, flags));
    let code = match &result {
        Ok(r) if r.pulses.as_ref().is_some_and(|p| !p.converged) => EXIT_UNCONVERGED,
        Ok(_) => EXIT_OK,
        Err(e) => exit_code(e),
    };
    (result, code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    const QUBITS: &str = "N=2\nM=1\nE=[1, -1]\nomega=[1]\nd=[1]\n\
        coupling { j=1 k=1 alpha=\"Y\" g=1 }\ncoupling { j=1 k=2 alpha=\"X\" g=1 }\n";

    fn no_timing() -> RunFlags {
        RunFlags {
            no_timing: true,
            ..Default::default()
        }
    }

    #[test]
    fn closure_report_round_trips() {
        let cfg = parse_config(QUBITS).unwrap();
        let r = analyze(Command::Closure, &cfg, &no_timing()).unwrap();
        let c = r.closure.as_ref().unwrap();
        assert_eq!(c.summary.dimension, 15);
        assert!(c.summary.controllable);
        let json = r.to_json();
        assert_eq!(AnalysisReport::from_json(&json).unwrap().to_json(), json);
        assert!(json.contains("\"wall_time\": null"));
    }

    #[test]
    fn check_on_zero_chain_coupling() {
        let text = "N=2\nM=3\nE=[0, 0]\nomega=[1, 1, 1]\nc=[1, 0]\nd=[1]\n";
        let cfg = parse_config(text).unwrap();
        let r = analyze(Command::Check, &cfg, &RunFlags::default()).unwrap();
        let c = r.conditions.unwrap();
        assert!(!c.cond1.holds);
        assert_eq!(c.cond1.zero_indices, vec![2]);
        assert!(r.closure.is_none());
    }

    #[test]
    fn command_names() {
        assert_eq!("verify-lemmas".parse::<Command>().unwrap(), Command::VerifyLemmas);
        assert!("plot".parse::<Command>().is_err());
        assert_eq!(serde_json::to_string(&Command::VerifyLemmas).unwrap(), "\"verify-lemmas\"");
    }
}
