//! Accelerated simulation over a run-length encoded tape.
//!
//! When the scanned symbol's transition writes, moves and stays in the same
//! state, the machine repeats it across the whole run of identical symbols
//! ahead of the head. That run is consumed in one move. Every other
//! transition is applied one step at a time, so the result is always exactly
//! the configuration the plain engine would reach.

use std::ops::ControlFlow;

use crate::engine::{EngineError, RunResult, RunStatus};
use crate::machine::{Direction, MachineSpec, SymbolId, Target};
use crate::tape::{Configuration, ControlState, Tape};
use crate::view::{ConfigView, Run};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Block {
    symbol: SymbolId,
    len: u64,
}

/// Blocks on one side of the head; the last element is adjacent to the head.
/// Everything past the bottom of the stack is blank.
#[derive(Debug, Clone, Default)]
struct Side {
    blocks: Vec<Block>,
}

impl Side {
    fn push(&mut self, symbol: SymbolId, len: u64, blank: SymbolId) {
        if len == 0 {
            return;
        }
        match self.blocks.last_mut() {
            Some(top) if top.symbol == symbol => top.len += len,
            None if symbol == blank => {}
            _ => self.blocks.push(Block { symbol, len }),
        }
    }

    /// Length of the run of `symbol` directly adjacent to the head, or `None`
    /// when the run is infinite (blank with nothing beyond).
    fn run_of(&self, symbol: SymbolId, blank: SymbolId) -> Option<u64> {
        match self.blocks.last() {
            Some(top) if top.symbol == symbol => Some(top.len),
            Some(_) => Some(0),
            None if symbol == blank => None,
            None => Some(0),
        }
    }

    /// Removes `n >= 1` cells nearest the head and returns the last one
    /// removed.
    fn take(&mut self, mut n: u64, blank: SymbolId) -> SymbolId {
        loop {
            let Some(top) = self.blocks.last_mut() else {
                return blank;
            };
            if top.len >= n {
                top.len -= n;
                let symbol = top.symbol;
                if top.len == 0 {
                    self.blocks.pop();
                }
                return symbol;
            }
            n -= top.len;
            self.blocks.pop();
        }
    }

    fn cell_count(&self) -> u64 {
        self.blocks.iter().map(|b| b.len).sum()
    }

    fn from_cells<I: Iterator<Item = SymbolId>>(cells_near_to_far: I, blank: SymbolId) -> Self {
        // build far-to-near so pushes merge in stack order
        let cells: Vec<SymbolId> = cells_near_to_far.collect();
        let mut side = Side::default();
        for &c in cells.iter().rev() {
            side.push(c, 1, blank);
        }
        side
    }
}

/// Engine state over a run-length encoded tape.
pub struct RleConfig {
    left: Side,
    right: Side,
    scanned: SymbolId,
    head: i64,
    blank: SymbolId,
    state: ControlState,
    steps: u64,
}

impl RleConfig {
    pub fn from_config(config: &Configuration) -> Self {
        let tape = &config.tape;
        let blank = tape.blank_symbol();
        let (cells, origin) = tape.raw_parts();
        let end = origin + cells.len() as i64;
        let head = config.head;
        RleConfig {
            left: Side::from_cells((origin..head).rev().map(|i| tape.get(i)), blank),
            right: Side::from_cells((head + 1..end).map(|i| tape.get(i)), blank),
            scanned: tape.get(head),
            head,
            blank,
            state: config.state,
            steps: config.steps,
        }
    }

    /// Expands back into a plain configuration.
    pub fn to_config(&self) -> Configuration {
        let left_len = self.left.cell_count();
        let mut word =
            Vec::with_capacity((left_len + 1 + self.right.cell_count()) as usize);
        for b in &self.left.blocks {
            word.extend(std::iter::repeat_n(b.symbol, b.len as usize));
        }
        word.push(self.scanned);
        for b in self.right.blocks.iter().rev() {
            word.extend(std::iter::repeat_n(b.symbol, b.len as usize));
        }
        Configuration {
            tape: Tape::from_word_at(&word, self.head - left_len as i64, self.blank),
            head: self.head,
            state: self.state,
            steps: self.steps,
        }
    }

    /// Number of blocks held, a rough measure of tape complexity.
    pub fn block_count(&self) -> usize {
        self.left.blocks.len() + self.right.blocks.len() + 1
    }

    /// Applies `count` repetitions of a transition that writes `write` and
    /// moves in `direction`, where the cells crossed all hold the scanned
    /// symbol (the last one may be the first cell past the run).
    fn sweep(&mut self, write: SymbolId, direction: Direction, count: u64) {
        let blank = self.blank;
        let (behind, ahead) = match direction {
            Direction::Right => (&mut self.left, &mut self.right),
            Direction::Left => (&mut self.right, &mut self.left),
        };
        behind.push(write, count, blank);
        self.scanned = ahead.take(count, blank);
        match direction {
            Direction::Right => self.head += count as i64,
            Direction::Left => self.head -= count as i64,
        }
        self.steps += count;
    }

    /// Applies one macro move: a whole run for a self-looping transition,
    /// otherwise a single step. Returns the number of steps taken, or `None`
    /// if the scanned cell has no transition.
    fn macro_step(&mut self, machine: &MachineSpec, budget: u64) -> Option<u64> {
        let ControlState::Running(state) = self.state else {
            return Some(0);
        };
        let t = machine.transition(state, self.scanned)?;
        let count = match t.next {
            Target::State(next) if next == state => {
                let ahead = match t.direction {
                    Direction::Right => &self.right,
                    Direction::Left => &self.left,
                };
                match ahead.run_of(self.scanned, self.blank) {
                    Some(extra) => (extra + 1).min(budget),
                    None => budget,
                }
            }
            Target::State(next) => {
                self.state = ControlState::Running(next);
                1
            }
            Target::Halt(halt) => {
                self.state = ControlState::Halted(halt);
                1
            }
        };
        self.sweep(t.write, t.direction, count);
        Some(count)
    }
}

/// Run iterator over one side of an [`RleConfig`].
pub struct BlockRuns<'a> {
    head: Option<SymbolId>,
    blocks: std::iter::Rev<std::slice::Iter<'a, Block>>,
}

impl Iterator for BlockRuns<'_> {
    type Item = Run;

    fn next(&mut self) -> Option<Run> {
        if let Some(s) = self.head.take() {
            return Some((s, 1));
        }
        self.blocks.next().map(|b| (b.symbol, b.len))
    }
}

impl ConfigView for RleConfig {
    type Runs<'a> = BlockRuns<'a>;

    fn state(&self) -> ControlState {
        self.state
    }

    fn steps(&self) -> u64 {
        self.steps
    }

    fn blank(&self) -> SymbolId {
        self.blank
    }

    fn scanned(&self) -> SymbolId {
        self.scanned
    }

    fn runs_right(&self) -> BlockRuns<'_> {
        BlockRuns {
            head: Some(self.scanned),
            blocks: self.right.blocks.iter().rev(),
        }
    }

    fn runs_left(&self) -> BlockRuns<'_> {
        BlockRuns {
            head: None,
            blocks: self.left.blocks.iter().rev(),
        }
    }
}

/// Outcome of a run that keeps its tape run-length encoded.
pub struct RleRun {
    pub status: RunStatus,
    pub config: RleConfig,
    pub steps: u64,
}

impl RleRun {
    /// Expands into a plain [`RunResult`]. The expanded tape must fit in
    /// memory, which fails for runs that wrote a huge number of cells.
    pub fn into_result(self) -> RunResult {
        RunResult {
            status: self.status,
            config: self.config.to_config(),
            steps: self.steps,
        }
    }
}

/// Runs `machine` like [`crate::engine::run`], skipping runs of repeated
/// transitions in one move. Final configuration, status and step count
/// are identical to the plain engine.
pub fn run_accelerated(
    machine: &MachineSpec,
    config: &Configuration,
    max_steps: u64,
) -> Result<RunResult, EngineError> {
    run_accelerated_with_observer(machine, config, max_steps, |_| ControlFlow::Continue(()))
}

/// [`run_rle`] followed by expansion of the final tape.
pub fn run_accelerated_with_observer<F>(
    machine: &MachineSpec,
    config: &Configuration,
    max_steps: u64,
    observer: F,
) -> Result<RunResult, EngineError>
where
    F: FnMut(&RleConfig) -> ControlFlow<()>,
{
    run_rle(machine, config, max_steps, observer).map(RleRun::into_result)
}

/// Accelerated run with an observer called before every macro move and once
/// on the final configuration, mirroring
/// [`crate::engine::run_with_observer`].
///
/// Configurations inside a skipped run are not observed. Every one of them
/// has the same (state, scanned symbol) pair as the observed configuration
/// that starts the run, and that pair's transition loops on its own state,
/// so an observer that only looks at configurations whose pair does not
/// loop sees exactly what it would see with the plain engine.
pub fn run_rle<F>(
    machine: &MachineSpec,
    config: &Configuration,
    max_steps: u64,
    mut observer: F,
) -> Result<RleRun, EngineError>
where
    F: FnMut(&RleConfig) -> ControlFlow<()>,
{
    if config.is_halted() {
        return Err(EngineError::AlreadyHalted);
    }
    let mut rle = RleConfig::from_config(config);
    let mut taken = 0u64;
    let status = loop {
        let remaining = max_steps - taken;
        if remaining == 0 {
            break RunStatus::BudgetExhausted;
        }
        let ControlState::Running(state) = rle.state else {
            unreachable!("halted configurations leave the loop");
        };
        let symbol = rle.scanned;
        if machine.transition(state, symbol).is_none() {
            break RunStatus::Stuck { state, symbol };
        }
        if observer(&rle).is_break() {
            return Ok(RleRun {
                status: RunStatus::ObserverStopped,
                config: rle,
                steps: taken,
            });
        }
        taken += rle.macro_step(machine, remaining).expect("transition checked above");
        if let ControlState::Halted(halt) = rle.state {
            break RunStatus::Halted { halt };
        }
    };
    let _ = observer(&rle);
    Ok(RleRun {
        status,
        config: rle,
        steps: taken,
    })
}
