//! Step-by-step simulation.

use std::ops::ControlFlow;

use thiserror::Error;

use crate::machine::{HaltId, MachineSpec, StateId, SymbolId, Target};
use crate::tape::{Configuration, ControlState, Tape};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("input word is empty")]
    EmptyWord,
    #[error("symbol `{0}` is not in the machine's alphabet")]
    InvalidSymbol(String),
    #[error("configuration is already halted")]
    AlreadyHalted,
}

/// Result of applying a single transition.
#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Continued(Configuration),
    Halted {
        config: Configuration,
        halt: HaltId,
    },
    /// No transition is defined for the scanned (state, symbol) pair. The
    /// configuration is returned unchanged.
    Stuck {
        config: Configuration,
        state: StateId,
        symbol: SymbolId,
    },
}

impl StepOutcome {
    pub fn config(&self) -> &Configuration {
        match self {
            StepOutcome::Continued(c) => c,
            StepOutcome::Halted { config, .. } | StepOutcome::Stuck { config, .. } => config,
        }
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunStatus {
    Halted { halt: HaltId },
    Stuck { state: StateId, symbol: SymbolId },
    BudgetExhausted,
    ObserverStopped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub status: RunStatus,
    pub config: Configuration,
    /// Steps executed by this run (the configuration's `steps` counter is
    /// cumulative).
    pub steps: u64,
}

/// Places `word` on an otherwise blank tape with the head on its first
/// symbol, in the start state.
pub fn initial_configuration(
    machine: &MachineSpec,
    word: &[SymbolId],
) -> Result<Configuration, EngineError> {
    if word.is_empty() {
        return Err(EngineError::EmptyWord);
    }
    if let Some(&bad) = word.iter().find(|&&s| s as usize >= machine.num_symbols()) {
        return Err(EngineError::InvalidSymbol(format!("#{bad}")));
    }
    let tape = Tape::from_word(word, machine.blank());
    Ok(Configuration::new(
        tape,
        0,
        ControlState::Running(machine.start()),
    ))
}

/// Same as [`initial_configuration`], reading the word from text.
pub fn initial_configuration_str(
    machine: &MachineSpec,
    word: &str,
) -> Result<Configuration, EngineError> {
    let symbols = machine.parse_word(word).map_err(EngineError::InvalidSymbol)?;
    initial_configuration(machine, &symbols)
}

enum Advance {
    Moved,
    Halted(HaltId),
    Stuck(StateId, SymbolId),
}

#[inline]
fn advance(machine: &MachineSpec, config: &mut Configuration) -> Advance {
    let state = match config.state {
        ControlState::Running(s) => s,
        ControlState::Halted(h) => return Advance::Halted(h),
    };
    let symbol = config.tape.get(config.head);
    let Some(t) = machine.transition(state, symbol) else {
        return Advance::Stuck(state, symbol);
    };
    config.tape.set(config.head, t.write);
    config.head += t.direction.offset();
    config.steps += 1;
    match t.next {
        Target::State(s) => {
            config.state = ControlState::Running(s);
            Advance::Moved
        }
        Target::Halt(h) => {
            config.state = ControlState::Halted(h);
            Advance::Halted(h)
        }
    }
}

/// Applies exactly one transition.
pub fn step(machine: &MachineSpec, config: &Configuration) -> Result<StepOutcome, EngineError> {
    if config.is_halted() {
        return Err(EngineError::AlreadyHalted);
    }
    let mut next = config.clone();
    Ok(match advance(machine, &mut next) {
        Advance::Moved => StepOutcome::Continued(next),
        Advance::Halted(halt) => StepOutcome::Halted { config: next, halt },
        Advance::Stuck(state, symbol) => StepOutcome::Stuck {
            config: next,
            state,
            symbol,
        },
    })
}

/// Steps until the machine halts, gets stuck, or `max_steps` transitions
/// have been applied.
pub fn run(
    machine: &MachineSpec,
    config: &Configuration,
    max_steps: u64,
) -> Result<RunResult, EngineError> {
    if config.is_halted() {
        return Err(EngineError::AlreadyHalted);
    }
    let mut cur = config.clone();
    let mut taken = 0u64;
    let status = loop {
        if taken == max_steps {
            break RunStatus::BudgetExhausted;
        }
        match advance(machine, &mut cur) {
            Advance::Moved => taken += 1,
            Advance::Halted(halt) => {
                taken += 1;
                break RunStatus::Halted { halt };
            }
            Advance::Stuck(state, symbol) => break RunStatus::Stuck { state, symbol },
        }
    };
    Ok(RunResult {
        status,
        config: cur,
        steps: taken,
    })
}

/// Like [`run`], calling `observer` with each configuration before the
/// transition out of it is applied, and once more with the final
/// configuration. Returning `ControlFlow::Break` stops the run before the
/// observed configuration is stepped; the result is then
/// [`RunStatus::ObserverStopped`] and no final call is made.
///
/// The observer is invoked exactly `steps + 1` times.
pub fn run_with_observer<F>(
    machine: &MachineSpec,
    config: &Configuration,
    max_steps: u64,
    mut observer: F,
) -> Result<RunResult, EngineError>
where
    F: FnMut(&Configuration) -> ControlFlow<()>,
{
    if config.is_halted() {
        return Err(EngineError::AlreadyHalted);
    }
    let mut cur = config.clone();
    let mut taken = 0u64;
    let status = loop {
        if taken == max_steps {
            break RunStatus::BudgetExhausted;
        }
        let ControlState::Running(state) = cur.state else {
            unreachable!("halted configurations leave the loop");
        };
        let symbol = cur.read();
        if machine.transition(state, symbol).is_none() {
            break RunStatus::Stuck { state, symbol };
        }
        if observer(&cur).is_break() {
            return Ok(RunResult {
                status: RunStatus::ObserverStopped,
                config: cur,
                steps: taken,
            });
        }
        taken += 1;
        if let Advance::Halted(halt) = advance(machine, &mut cur) {
            break RunStatus::Halted { halt };
        }
    };
    // the final call cannot stop anything any more
    let _ = observer(&cur);
    Ok(RunResult {
        status,
        config: cur,
        steps: taken,
    })
}
