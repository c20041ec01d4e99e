//! Checks bounded instances of each machine's claimed behaviour by running it
//! and comparing its checkpoints with the oracle.

use std::fmt;
use std::ops::ControlFlow;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::accel::{run_rle, RleConfig};
use crate::encoding::{encode, theorem1_target, CheckpointTemplate, ComparisonMode, EncodingError};
use crate::engine::{initial_configuration_str, EngineError, RunStatus};
use crate::oracle::{orbit, t_step, trajectory, OracleError};
use crate::view::ConfigView;
use crate::zoo::{builtin, diff_machines, HaltingKind, MachineDiff, ZooError};

/// Step budget used when the caller does not choose one.
pub const DEFAULT_MAX_STEPS: u64 = 100_000_000;

// far above any trajectory length reachable from a u64 start
const ORACLE_ITERATIONS: usize = 100_000;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Zoo(#[from] ZooError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("inputs must be positive integers")]
    NotPositive,
    #[error("{machine} is not a {expected} machine")]
    WrongClass {
        machine: String,
        expected: &'static str,
    },
    #[error("empty range {lo}..={hi}")]
    BadRange { lo: u64, hi: u64 },
    #[error("cannot start worker threads: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Halted,
    #[serde(rename = "theorem1-config-reached")]
    Theorem1ConfigReached,
    /// A never-halting machine showed checkpoint 1 after its first step.
    LoopEntered,
    BudgetExhausted,
    Stuck,
    CheckpointMismatch,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Halted => "halted",
            Outcome::Theorem1ConfigReached => "theorem1-config-reached",
            Outcome::LoopEntered => "loop-entered",
            Outcome::BudgetExhausted => "budget-exhausted",
            Outcome::Stuck => "stuck",
            Outcome::CheckpointMismatch => "checkpoint-mismatch",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    /// A never-halting machine ran out of budget without halting, getting
    /// stuck or contradicting the oracle.
    WeakPass,
    /// A machine expected to stop ran out of budget.
    Inconclusive,
    Fail,
}

impl Verdict {
    pub fn is_failure(self) -> bool {
        self == Verdict::Fail
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::WeakPass => "weak-pass",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub machine: String,
    pub input: u64,
    pub word: String,
    pub outcome: Outcome,
    pub steps: u64,
    pub checkpoints: Vec<u64>,
    /// Oracle trajectory of the input, ending at the first 1.
    pub oracle: Vec<u64>,
    pub verdict: Verdict,
    pub reason: String,
    pub declared_mode: ComparisonMode,
    /// Strongest mode the checkpoints satisfy, if any.
    pub mode_satisfied: Option<ComparisonMode>,
    /// Number of zeros left of the head at the M1 target configuration.
    pub n: Option<u64>,
    pub halt_state: Option<String>,
}

impl VerificationReport {
    /// One line of human-readable text.
    pub fn text_line(&self) -> String {
        let mut line = format!(
            "{} {} {} {} steps={} checkpoints={}",
            self.machine,
            self.input,
            self.verdict,
            self.outcome,
            self.steps,
            self.checkpoints.len()
        );
        if let Some(n) = self.n {
            line.push_str(&format!(" n={n}"));
        }
        if let Some(h) = &self.halt_state {
            line.push_str(&format!(" halt={h}"));
        }
        if !self.reason.is_empty() {
            line.push_str(&format!(" ({})", self.reason));
        }
        line
    }

    pub fn json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Strongest comparison mode `checkpoints` satisfies as a prefix of a run
/// from `x`.
pub fn satisfied_mode(x: u64, checkpoints: &[u64]) -> Result<Option<ComparisonMode>, OracleError> {
    if checkpoints.first() != Some(&x) {
        return Ok(None);
    }
    if orbit(x, checkpoints.len())? == checkpoints {
        return Ok(Some(ComparisonMode::ExactTrajectory));
    }
    for pair in checkpoints.windows(2) {
        if !reaches(pair[0], pair[1])? {
            return Ok(None);
        }
    }
    Ok(Some(ComparisonMode::OrderedSubsequence))
}

/// True when `T^k(from) = to` for some `k ≥ 1`.
fn reaches(from: u64, to: u64) -> Result<bool, OracleError> {
    let mut v = from;
    // the orbit is the trajectory followed by the 2, 1 loop
    let limit = trajectory(from, ORACLE_ITERATIONS)?.values.len() + 1;
    for _ in 0..limit {
        v = t_step(v)?;
        if v == to {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    /// Stop at the M1 target configuration.
    Theorem1,
    /// Stop at the first checkpoint 1 after step 0.
    LoopEntry,
    /// Run until the machine stops.
    Halt,
}

struct Observed {
    checkpoints: Vec<u64>,
    target: Option<u64>,
}

fn run_checked(machine_name: &str, input: u64, max_steps: u64, goal: Goal) -> Result<VerificationReport, VerifyError> {
    if input == 0 {
        return Err(VerifyError::NotPositive);
    }
    let entry = builtin(machine_name)?;
    let machine = &entry.machine;
    let template = CheckpointTemplate::new(entry.template, machine)?;
    let word = encode(input, entry.encoding)?;
    let init = initial_configuration_str(machine, &word)?;
    let oracle = trajectory(input, ORACLE_ITERATIONS)?.values;

    let mut seen = Observed {
        checkpoints: Vec::new(),
        target: None,
    };
    let observe = |view: &RleConfig| {
        if let Some(v) = template.checkpoint(view) {
            seen.checkpoints.push(v);
            if goal == Goal::LoopEntry && v == 1 && view.steps() > 0 {
                return ControlFlow::Break(());
            }
        }
        if goal == Goal::Theorem1 && view.steps() > 0 {
            if let Some(n) = theorem1_target(machine, view) {
                seen.target = Some(n);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    };
    let result = run_rle(machine, &init, max_steps, observe)?;

    let mode_satisfied = satisfied_mode(input, &seen.checkpoints)?;
    let declared_mode = template.mode;
    let mode_ok = mode_satisfied.is_some_and(|m| m >= declared_mode);
    let reached_one = seen.checkpoints.last() == Some(&1);
    let mut halt_state = None;

    let (outcome, verdict, reason) = match result.status {
        RunStatus::Stuck { state, symbol } => (
            Outcome::Stuck,
            Verdict::Fail,
            format!(
                "no transition for ({}, {}): transcription error",
                machine.state_name(state),
                machine.symbol_name(symbol)
            ),
        ),
        RunStatus::Halted { halt } => {
            let name = machine.halt_name(halt).to_owned();
            halt_state = Some(name.clone());
            if goal != Goal::Halt {
                (Outcome::Halted, Verdict::Fail, format!("halted in {name} but must never halt"))
            } else if Some(name.as_str()) != entry.halt_state {
                (Outcome::Halted, Verdict::Fail, format!("halted in {name}, not the designated halt state"))
            } else if !mode_ok {
                (Outcome::CheckpointMismatch, Verdict::Fail, mismatch_reason(declared_mode))
            } else {
                (Outcome::Halted, Verdict::Pass, String::new())
            }
        }
        RunStatus::ObserverStopped => {
            let outcome = match goal {
                Goal::Theorem1 => Outcome::Theorem1ConfigReached,
                _ => Outcome::LoopEntered,
            };
            if mode_ok && reached_one {
                (outcome, Verdict::Pass, String::new())
            } else {
                (Outcome::CheckpointMismatch, Verdict::Fail, mismatch_reason(declared_mode))
            }
        }
        RunStatus::BudgetExhausted => {
            if !seen.checkpoints.is_empty() && !mode_ok {
                (Outcome::CheckpointMismatch, Verdict::Fail, mismatch_reason(declared_mode))
            } else if entry.halting_kind == HaltingKind::NeverHalting && goal != Goal::Theorem1 {
                (Outcome::BudgetExhausted, Verdict::WeakPass, "no halt within budget".into())
            } else {
                (Outcome::BudgetExhausted, Verdict::Inconclusive, format!("budget of {max_steps} steps exhausted"))
            }
        }
    };

    Ok(VerificationReport {
        machine: machine.name().to_owned(),
        input,
        word,
        outcome,
        steps: result.steps,
        checkpoints: seen.checkpoints,
        oracle,
        verdict,
        reason,
        declared_mode,
        mode_satisfied,
        n: seen.target,
        halt_state,
    })
}

fn mismatch_reason(mode: ComparisonMode) -> String {
    format!("checkpoints do not match the oracle as an {mode}")
}

/// Runs M1 on `x` until it reaches `b 0^n (A1) b` after at least one step,
/// requiring its checkpoints to follow the oracle trajectory exactly.
pub fn verify_theorem1(x: u64, max_steps: u64) -> Result<VerificationReport, VerifyError> {
    run_checked("M1", x, max_steps, Goal::Theorem1)
}

pub fn verify_halting(machine: &str, input: u64, max_steps: u64) -> Result<VerificationReport, VerifyError> {
    let entry = builtin(machine)?;
    if entry.halting_kind != HaltingKind::HaltsOnLoop {
        return Err(VerifyError::WrongClass {
            machine: entry.machine.name().to_owned(),
            expected: "halting",
        });
    }
    run_checked(machine, input, max_steps, Goal::Halt)
}

pub fn verify_never_halting(machine: &str, input: u64, max_steps: u64) -> Result<VerificationReport, VerifyError> {
    let entry = builtin(machine)?;
    if entry.halting_kind != HaltingKind::NeverHalting {
        return Err(VerifyError::WrongClass {
            machine: entry.machine.name().to_owned(),
            expected: "never-halting",
        });
    }
    let goal = if entry.machine.name() == "M1" {
        Goal::Theorem1
    } else {
        Goal::LoopEntry
    };
    run_checked(machine, input, max_steps, goal)
}

/// Picks the check that fits the machine.
pub fn verify(machine: &str, input: u64, max_steps: u64) -> Result<VerificationReport, VerifyError> {
    match builtin(machine)?.halting_kind {
        HaltingKind::HaltsOnLoop => verify_halting(machine, input, max_steps),
        HaltingKind::NeverHalting => verify_never_halting(machine, input, max_steps),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct VerdictCounts {
    pub pass: u64,
    pub weak_pass: u64,
    pub inconclusive: u64,
    pub fail: u64,
}

impl VerdictCounts {
    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Pass => self.pass += 1,
            Verdict::WeakPass => self.weak_pass += 1,
            Verdict::Inconclusive => self.inconclusive += 1,
            Verdict::Fail => self.fail += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.pass + self.weak_pass + self.inconclusive + self.fail
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeSummary {
    pub machine: String,
    pub lo: u64,
    pub hi: u64,
    pub reports: Vec<VerificationReport>,
    pub counts: VerdictCounts,
    pub max_steps_observed: u64,
    /// Elapsed time; the only field that varies between identical runs.
    pub wall_time_ms: u128,
}

impl RangeSummary {
    /// Worst verdict in the range, or pass for an empty one.
    pub fn worst(&self) -> Verdict {
        self.reports.iter().map(|r| r.verdict).max().unwrap_or(Verdict::Pass)
    }

    pub fn text_line(&self) -> String {
        let c = &self.counts;
        format!(
            "{} {}..={}: pass={} weak-pass={} inconclusive={} fail={} max-steps={} wall-time-ms={}",
            self.machine, self.lo, self.hi, c.pass, c.weak_pass, c.inconclusive, c.fail,
            self.max_steps_observed, self.wall_time_ms
        )
    }

    /// Summary record without the per-input reports.
    pub fn json_line(&self) -> String {
        serde_json::json!({
            "record": "summary",
            "machine": self.machine,
            "lo": self.lo,
            "hi": self.hi,
            "counts": self.counts,
            "max_steps_observed": self.max_steps_observed,
            "wall_time_ms": self.wall_time_ms,
        })
        .to_string()
    }
}

/// Verifies every input in `lo..=hi` on up to `jobs` threads (0 picks the
/// number of CPUs). Reports come back in input order.
pub fn verify_range(machine: &str, lo: u64, hi: u64, max_steps: u64, jobs: usize) -> Result<RangeSummary, VerifyError> {
    if lo == 0 {
        return Err(VerifyError::NotPositive);
    }
    if lo > hi {
        return Err(VerifyError::BadRange { lo, hi });
    }
    let name = builtin(machine)?.machine.name().to_owned();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| VerifyError::ThreadPool(e.to_string()))?;
    let start = Instant::now();
    let reports = pool.install(|| {
        (lo..=hi)
            .into_par_iter()
            .map(|x| verify(&name, x, max_steps))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let wall_time_ms = start.elapsed().as_millis();
    let mut counts = VerdictCounts::default();
    for r in &reports {
        counts.add(r.verdict);
    }
    let max_steps_observed = reports.iter().map(|r| r.steps).max().unwrap_or(0);
    Ok(RangeSummary {
        machine: name,
        lo,
        hi,
        reports,
        counts,
        max_steps_observed,
        wall_time_ms,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivationCheck {
    pub base: &'static str,
    pub derived: &'static str,
    pub diff: MachineDiff,
    pub expected: &'static str,
    pub passed: bool,
}

/// Each halting machine and the never-halting machine it extends, with the
/// exact structural change expected between them.
pub const DERIVATIONS: [(&str, &str, &str); 4] = [
    ("M2", "M3", "states added: C; (A,1): xRB -> xRC"),
    ("M4", "M5", "states added: D; (A,1): xRB -> xRD"),
    ("M7", "M8", "states added: L M; (A,1): 0RB -> 0RL"),
    ("M1", "M6", "states added: D E; (B,b): 2LC -> 2LE; (C,b): bRA -> bRD"),
];

pub fn derivation_check() -> Result<Vec<DerivationCheck>, VerifyError> {
    DERIVATIONS
        .iter()
        .map(|&(base, derived, expected)| {
            let diff = diff_machines(&builtin(base)?.machine, &builtin(derived)?.machine);
            let passed = diff.to_string() == expected;
            Ok(DerivationCheck {
                base,
                derived,
                diff,
                expected,
                passed,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m1_target_small_inputs() {
        let r = verify_theorem1(2, 1000).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!((r.n, r.steps), (Some(0), 4));
        assert_eq!(r.outcome, Outcome::Theorem1ConfigReached);

        let r = verify_theorem1(1, 1000).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.checkpoints, [1, 2, 1]);
        assert_eq!(r.n, Some(1));

        let r = verify_theorem1(7, 100_000).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.checkpoints, [7, 11, 17, 26, 13, 20, 10, 5, 8, 4, 2, 1]);
        assert_eq!(r.mode_satisfied, Some(ComparisonMode::ExactTrajectory));
    }

    #[test]
    fn m1_budget_is_inconclusive() {
        let r = verify_theorem1(27, 10).unwrap();
        assert_eq!(r.outcome, Outcome::BudgetExhausted);
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn halting_examples() {
        let r = verify_halting("M8", 1, 100).unwrap();
        assert_eq!((r.verdict, r.steps), (Verdict::Pass, 3));
        assert_eq!(r.halt_state.as_deref(), Some("Z"));
        for (m, x) in [("M6", 1), ("M3", 1), ("M5", 1), ("M3", 7)] {
            let r = verify_halting(m, x, 1_000_000).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{}", r.text_line());
            assert_eq!(r.halt_state.as_deref(), Some("H"));
        }
    }

    #[test]
    fn never_halting_examples() {
        let r = verify_never_halting("M1", 2, 1000).unwrap();
        assert_eq!((r.verdict, r.n), (Verdict::Pass, Some(0)));
        for (m, x) in [("M2", 1), ("M4", 2), ("M7", 5)] {
            let r = verify_never_halting(m, x, 1_000_000).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{}", r.text_line());
            assert_eq!(r.outcome, Outcome::LoopEntered);
        }
        let r = verify_never_halting("M2", 27, 50).unwrap();
        assert_eq!(r.verdict, Verdict::WeakPass);
    }

    #[test]
    fn class_is_checked() {
        assert!(matches!(verify_halting("M1", 1, 10), Err(VerifyError::WrongClass { .. })));
        assert!(matches!(verify_never_halting("M8", 1, 10), Err(VerifyError::WrongClass { .. })));
        assert!(matches!(verify("M9", 1, 10), Err(VerifyError::Zoo(_))));
        assert!(matches!(verify("M1", 0, 10), Err(VerifyError::NotPositive)));
    }

    #[test]
    fn mode_detection() {
        use ComparisonMode::*;
        assert_eq!(satisfied_mode(7, &[7, 11, 17]).unwrap(), Some(ExactTrajectory));
        assert_eq!(satisfied_mode(7, &[7, 17, 13, 1]).unwrap(), Some(OrderedSubsequence));
        assert_eq!(satisfied_mode(7, &[7, 13, 17]).unwrap(), None);
        assert_eq!(satisfied_mode(7, &[11]).unwrap(), None);
        assert_eq!(satisfied_mode(1, &[1, 2, 1]).unwrap(), Some(ExactTrajectory));
        assert_eq!(satisfied_mode(1, &[1, 1]).unwrap(), Some(OrderedSubsequence));
        assert_eq!(satisfied_mode(3, &[]).unwrap(), None);
    }

    #[test]
    fn range_is_ordered_and_counted() {
        let s = verify_range("m8", 1, 20, 1_000_000, 3).unwrap();
        assert_eq!(s.machine, "M8");
        assert_eq!(s.reports.len(), 20);
        assert!(s.reports.iter().map(|r| r.input).eq(1..=20));
        assert_eq!(s.counts.pass, 20);
        assert_eq!(s.counts.total(), 20);
        assert!(matches!(verify_range("M8", 5, 4, 10, 1), Err(VerifyError::BadRange { .. })));
        assert!(matches!(verify_range("M8", 0, 4, 10, 1), Err(VerifyError::NotPositive)));
    }

    #[test]
    fn derivations_hold() {
        for d in derivation_check().unwrap() {
            assert!(d.passed, "{} -> {}: {}", d.base, d.derived, d.diff);
        }
    }
}
