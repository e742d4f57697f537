//! One function per subcommand. Each returns a serializable document; the
//! caller picks JSON or text.

use qobserve::observability::DEFAULT_WORD_LEN;
use qobserve::{
    analyze_with, ancilla_tomography, design_permutation_experiment, indistinguishable_with, run_experiment,
    run_permutation_tomography, sample_propagators, AncillaReconstruction, ExperimentScript, Matrix,
    MeasurementRecord, ObservabilityReport, OutputNoise, PermutationDesign, ReconstructionResult, ScriptBackAction,
    Tol, Verdict,
};
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::scenario::Scenario;

/// Random experiments run by `distinguish` to cross-check its verdict.
pub const SAMPLED_EXPERIMENTS: u64 = 32;

#[derive(Debug, Clone, Serialize)]
pub struct ExpectationCheck {
    pub field: String,
    pub expected: Value,
    pub actual: Value,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeDoc {
    pub scenario: String,
    pub tolerance: Tol,
    pub max_k: usize,
    /// `von_neumann`, or `kraus:NAME` when the scenario names a channel.
    pub back_action: String,
    pub report: ObservabilityReport,
    pub expectations: Vec<ExpectationCheck>,
}

impl AnalyzeDoc {
    pub fn failed_expectations(&self) -> Vec<&str> {
        self.expectations
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.field.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SampledCheck {
    pub experiments: u64,
    pub seed: u64,
    /// Largest output difference between the two states over all samples.
    pub max_output_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistinguishDoc {
    pub scenario: String,
    pub state_a: String,
    pub state_b: String,
    pub tolerance: Tol,
    pub k: usize,
    pub verdict: Verdict,
    /// Verdicts for `1..=k` measurements.
    pub by_order: Vec<Verdict>,
    pub sampled: SampledCheck,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateDoc {
    pub scenario: String,
    pub script: String,
    pub state: String,
    pub tolerance: Tol,
    pub record: MeasurementRecord<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PermutationDoc {
    pub scenario: String,
    pub state: String,
    pub tolerance: Tol,
    pub noise: Option<OutputNoise>,
    pub design: PermutationDesign<f64>,
    pub result: ReconstructionResult<f64>,
    /// Trace-one diagonal of `X1 ρ X1*` computed directly.
    pub true_diagonal: Vec<f64>,
    pub max_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AncillaDoc {
    pub scenario: String,
    pub unknown: String,
    pub ancilla: String,
    pub tolerance: Tol,
    pub result: AncillaReconstruction<f64>,
    /// Largest entry of the difference between estimate and true state.
    pub max_error: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ReconstructDoc {
    Permutation(Box<PermutationDoc>),
    Ancilla(Box<AncillaDoc>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Permutation,
    Ancilla,
}

pub fn analyze(s: &Scenario) -> CliResult<AnalyzeDoc> {
    let tol = s.analysis.tolerance;
    let report = analyze_with(&s.system, s.analysis.max_k, s.channel(), &tol)
        .map_err(|e| CliError::computation(format!("{}: analyze", s.source), e))?;
    let full = serde_json::to_value(&report).expect("report serializes");
    let expectations = s
        .expected
        .iter()
        .map(|(field, expected)| {
            let actual = full.get(field).cloned().unwrap_or(Value::Null);
            ExpectationCheck {
                field: field.clone(),
                pass: &actual == expected,
                expected: expected.clone(),
                actual,
            }
        })
        .collect();
    Ok(AnalyzeDoc {
        scenario: s.source.clone(),
        tolerance: tol,
        max_k: s.analysis.max_k,
        back_action: match &s.analysis.channel {
            Some(c) => format!("kraus:{c}"),
            None => "von_neumann".to_string(),
        },
        report,
        expectations,
    })
}

pub fn distinguish(s: &Scenario, state_a: &str, state_b: &str, k: usize) -> CliResult<DistinguishDoc> {
    if k < 1 {
        return Err(CliError::validation("--k", "must be at least 1"));
    }
    let tol = s.analysis.tolerance;
    let n = s.system.dim_n();
    let a = s.state(state_a, "STATE_A")?;
    let b = s.state(state_b, "STATE_B")?;
    for (st, path) in [(a, format!("states.{state_a}")), (b, format!("states.{state_b}"))] {
        if st.dim() != n {
            return Err(CliError::validation(
                path,
                format!("dimension {}, expected system dimension {n}", st.dim()),
            ));
        }
    }
    let ctx = |what: &str| format!("{}: {what}", s.source);
    let (ra, rb) = (a.physical(), b.physical());
    let by_order = (1..=k)
        .map(|j| indistinguishable_with(&s.system, &ra, &rb, j, s.channel(), &tol))
        .collect::<qobserve::Result<Vec<_>>>()
        .map_err(|e| CliError::computation(ctx("distinguish"), e))?;

    let seed = s.analysis.seed;
    let mut gap = 0.0f64;
    for i in 0..SAMPLED_EXPERIMENTS {
        // disjoint sub-seed blocks, so neighbouring seeds share no samples
        let sub = seed.wrapping_mul(SAMPLED_EXPERIMENTS).wrapping_add(i);
        let xs = sample_propagators(&s.system, k, sub, DEFAULT_WORD_LEN)
            .map_err(|e| CliError::computation(ctx("sampling"), e))?;
        let mut script = ExperimentScript::from_unitaries(xs);
        if let Some(ch) = s.channel() {
            script.back_action = ScriptBackAction::Kraus(ch.clone());
        }
        let ya = run_experiment(a, &s.system, &script, &tol).map_err(|e| CliError::computation(ctx("sampling"), e))?;
        let yb = run_experiment(b, &s.system, &script, &tol).map_err(|e| CliError::computation(ctx("sampling"), e))?;
        for (p, q) in ya.outputs.iter().zip(&yb.outputs) {
            gap = gap.max((p - q).abs());
        }
    }

    Ok(DistinguishDoc {
        scenario: s.source.clone(),
        state_a: state_a.to_string(),
        state_b: state_b.to_string(),
        tolerance: tol,
        k,
        verdict: by_order[k - 1].clone(),
        by_order,
        sampled: SampledCheck {
            experiments: SAMPLED_EXPERIMENTS,
            seed,
            max_output_gap: gap,
        },
    })
}

pub fn simulate(s: &Scenario, script: &str, state: &str) -> CliResult<SimulateDoc> {
    let tol = s.analysis.tolerance;
    let sc = s.script(script, "--script")?;
    let st = s.state(state, "--state")?;
    if st.dim() != s.system.dim_n() {
        return Err(CliError::validation(
            format!("states.{state}"),
            format!("dimension {}, expected system dimension {}", st.dim(), s.system.dim_n()),
        ));
    }
    let record = run_experiment(st, &s.system, sc, &tol)
        .map_err(|e| CliError::computation(format!("{}: simulate", s.source), e))?;
    Ok(SimulateDoc {
        scenario: s.source.clone(),
        script: script.to_string(),
        state: state.to_string(),
        tolerance: tol,
        record,
    })
}

pub fn reconstruct(s: &Scenario, mode: Mode) -> CliResult<ReconstructDoc> {
    match mode {
        Mode::Permutation => reconstruct_permutation(s).map(|d| ReconstructDoc::Permutation(Box::new(d))),
        Mode::Ancilla => reconstruct_ancilla(s).map(|d| ReconstructDoc::Ancilla(Box::new(d))),
    }
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn reconstruct_permutation(s: &Scenario) -> CliResult<PermutationDoc> {
    let setup = s
        .reconstruction
        .permutation
        .as_ref()
        .ok_or_else(|| CliError::validation("reconstruction.permutation", "scenario has no permutation section"))?;
    let tol = s.analysis.tolerance;
    let ctx = format!("{}: permutation reconstruction", s.source);
    let rho = &s.states[&setup.state];
    let design = design_permutation_experiment(&setup.observable, &tol).map_err(|e| CliError::computation(&ctx, e))?;
    let noise = setup.noise_sigma.filter(|s| *s > 0.0).map(|sigma| OutputNoise {
        sigma,
        seed: s.analysis.seed,
    });
    let result =
        run_permutation_tomography(rho, &setup.frame, &design, noise, &tol).map_err(|e| CliError::computation(&ctx, e))?;
    let true_diagonal = rho.physical().conjugate_by(&setup.frame).real_diag();
    Ok(PermutationDoc {
        scenario: s.source.clone(),
        state: setup.state.clone(),
        tolerance: tol,
        noise,
        max_error: max_gap(&result.diagonal_trace_one, &true_diagonal),
        design,
        result,
        true_diagonal,
    })
}

fn reconstruct_ancilla(s: &Scenario) -> CliResult<AncillaDoc> {
    let setup = s
        .reconstruction
        .ancilla
        .as_ref()
        .ok_or_else(|| CliError::validation("reconstruction.ancilla", "scenario has no ancilla section"))?;
    let tol = s.analysis.tolerance;
    let rho1 = &s.states[&setup.unknown];
    let rho2 = &s.states[&setup.ancilla];
    let result = ancilla_tomography(rho1, rho2, &setup.joint_observable, setup.probes.clone(), &tol)
        .map_err(|e| CliError::computation(format!("{}: ancilla reconstruction", s.source), e))?;
    let diff: Matrix = &result.rho1 - &rho1.physical();
    Ok(AncillaDoc {
        scenario: s.source.clone(),
        unknown: setup.unknown.clone(),
        ancilla: setup.ancilla.clone(),
        tolerance: tol,
        max_error: diff.max_abs(),
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::scenario::{parse, Overrides};

    fn load(name: &str) -> Scenario {
        parse(&builtin::scenario(name).unwrap(), name, &Overrides::default()).unwrap()
    }

    #[test]
    fn builtin_expectations_hold() {
        for name in builtin::names() {
            let doc = analyze(&load(name)).unwrap();
            assert!(doc.failed_expectations().is_empty(), "{name}: {:?}", doc.expectations);
        }
    }

    #[test]
    fn hidden_pair_agrees_with_samples() {
        let s = load("ising");
        let d = distinguish(&s, "base", "hidden", 3).unwrap();
        assert!(d.by_order.iter().all(|v| v.indistinguishable));
        assert!(d.sampled.max_output_gap < 1e-8);
    }

    #[test]
    fn second_measurement_separates() {
        let s = load("qutrit");
        let d = distinguish(&s, "base", "shadow", 2).unwrap();
        assert!(d.by_order[0].indistinguishable);
        assert!(!d.by_order[1].indistinguishable);
        assert!(d.sampled.max_output_gap > 1e-6);
    }

    #[test]
    fn reconstructions_recover_truth() {
        for name in ["qutrit", "planar-rotation"] {
            match reconstruct(&load(name), Mode::Permutation).unwrap() {
                ReconstructDoc::Permutation(d) => assert!(d.max_error < 1e-8, "{name}: {}", d.max_error),
                _ => unreachable!(),
            }
        }
        match reconstruct(&load("three-qubit"), Mode::Ancilla).unwrap() {
            ReconstructDoc::Ancilla(d) => assert!(d.max_error < 1e-8, "{}", d.max_error),
            _ => unreachable!(),
        }
    }

    #[test]
    fn missing_section_is_validation() {
        let err = reconstruct(&load("ising"), Mode::Ancilla).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn simulate_counts_measurements() {
        let s = load("rotation-qubit");
        let d = simulate(&s, "weak-pulses", "a").unwrap();
        assert_eq!(d.record.outputs.len(), 3);
        assert!(simulate(&s, "nope", "a").is_err());
    }
}
