//! Machine descriptions: states, symbols and a partial next-move table.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Index into [`MachineSpec::symbols`].
pub type SymbolId = u8;
/// Index into [`MachineSpec::states`].
pub type StateId = u16;
/// Index into [`MachineSpec::halt_states`].
pub type HaltId = u16;

/// Maximum alphabet size; symbols are stored as single bytes on the tape.
pub const MAX_SYMBOLS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    pub fn offset(self) -> i64 {
        match self {
            Direction::Left => -1,
            Direction::Right => 1,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Direction::Left => "L",
            Direction::Right => "R",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        match token {
            "L" => Some(Direction::Left),
            "R" => Some(Direction::Right),
            _ => None,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Where a transition leads: an ordinary state or a halting state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    State(StateId),
    Halt(HaltId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub write: SymbolId,
    pub direction: Direction,
    pub next: Target,
}

/// A transition written with names instead of indices, as it appears in a
/// machine file.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub state: String,
    pub read: String,
    pub write: String,
    pub direction: Direction,
    pub next: String,
}

impl Rule {
    pub fn new(state: &str, read: &str, write: &str, direction: Direction, next: &str) -> Self {
        Rule {
            state: state.to_owned(),
            read: read.to_owned(),
            write: write.to_owned(),
            direction,
            next: next.to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("machine has no states")]
    NoStates,
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("too many symbols ({0}); at most {MAX_SYMBOLS} are supported")]
    TooManySymbols(usize),
    #[error("too many states ({0})")]
    TooManyStates(usize),
    #[error("blank symbol `{0}` is not in the alphabet")]
    UnknownBlank(String),
    #[error("start state `{0}` is not declared")]
    UnknownStart(String),
    #[error("`{0}` is both an ordinary state and a halting state")]
    HaltStateOverlap(String),
    #[error("duplicate halting state `{0}`")]
    DuplicateHaltState(String),
    #[error("rule source state `{0}` is not declared")]
    UnknownState(String),
    #[error("symbol `{0}` is not declared")]
    UnknownSymbol(String),
    #[error("target state `{0}` is neither a state nor a halting state")]
    UnknownTarget(String),
    #[error("more than one rule for ({state}, {symbol})")]
    DuplicateRule { state: String, symbol: String },
}

/// A deterministic single-tape Turing machine.
///
/// Equality compares every field, including declaration order of states and
/// symbols, so a parse/format round trip must reproduce the same order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineSpec {
    name: String,
    states: Vec<String>,
    symbols: Vec<String>,
    blank: SymbolId,
    start: StateId,
    halt_states: Vec<String>,
    // row-major: states.len() x symbols.len()
    table: Vec<Option<Transition>>,
}

impl MachineSpec {
    pub fn new(
        name: &str,
        states: Vec<String>,
        symbols: Vec<String>,
        blank: &str,
        start: &str,
        halt_states: Vec<String>,
        rules: &[Rule],
    ) -> Result<Self, MachineError> {
        if states.is_empty() {
            return Err(MachineError::NoStates);
        }
        if symbols.len() > MAX_SYMBOLS {
            return Err(MachineError::TooManySymbols(symbols.len()));
        }
        if states.len() > StateId::MAX as usize || halt_states.len() > HaltId::MAX as usize {
            return Err(MachineError::TooManyStates(states.len() + halt_states.len()));
        }
        check_unique(&states, MachineError::DuplicateState)?;
        check_unique(&symbols, MachineError::DuplicateSymbol)?;
        check_unique(&halt_states, MachineError::DuplicateHaltState)?;
        if let Some(h) = halt_states.iter().find(|h| states.contains(h)) {
            return Err(MachineError::HaltStateOverlap(h.clone()));
        }

        let blank_id = position(&symbols, blank)
            .ok_or_else(|| MachineError::UnknownBlank(blank.to_owned()))?
            as SymbolId;
        let start_id = position(&states, start)
            .ok_or_else(|| MachineError::UnknownStart(start.to_owned()))?
            as StateId;

        let mut spec = MachineSpec {
            name: name.to_owned(),
            table: vec![None; states.len() * symbols.len()],
            states,
            symbols,
            blank: blank_id,
            start: start_id,
            halt_states,
        };
        for rule in rules {
            let state = spec
                .state_id(&rule.state)
                .ok_or_else(|| MachineError::UnknownState(rule.state.clone()))?;
            let read = spec
                .symbol_id(&rule.read)
                .ok_or_else(|| MachineError::UnknownSymbol(rule.read.clone()))?;
            let write = spec
                .symbol_id(&rule.write)
                .ok_or_else(|| MachineError::UnknownSymbol(rule.write.clone()))?;
            let next = spec
                .target_id(&rule.next)
                .ok_or_else(|| MachineError::UnknownTarget(rule.next.clone()))?;
            let slot = spec.index(state, read);
            if spec.table[slot].is_some() {
                return Err(MachineError::DuplicateRule {
                    state: rule.state.clone(),
                    symbol: rule.read.clone(),
                });
            }
            spec.table[slot] = Some(Transition {
                write,
                direction: rule.direction,
                next,
            });
        }
        Ok(spec)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn halt_states(&self) -> &[String] {
        &self.halt_states
    }

    pub fn blank(&self) -> SymbolId {
        self.blank
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.symbols.len()
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        position(&self.states, name).map(|i| i as StateId)
    }

    pub fn symbol_id(&self, name: &str) -> Option<SymbolId> {
        position(&self.symbols, name).map(|i| i as SymbolId)
    }

    pub fn halt_id(&self, name: &str) -> Option<HaltId> {
        position(&self.halt_states, name).map(|i| i as HaltId)
    }

    pub fn target_id(&self, name: &str) -> Option<Target> {
        self.state_id(name)
            .map(Target::State)
            .or_else(|| self.halt_id(name).map(Target::Halt))
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id as usize]
    }

    pub fn symbol_name(&self, id: SymbolId) -> &str {
        &self.symbols[id as usize]
    }

    pub fn halt_name(&self, id: HaltId) -> &str {
        &self.halt_states[id as usize]
    }

    pub fn target_name(&self, target: Target) -> &str {
        match target {
            Target::State(s) => self.state_name(s),
            Target::Halt(h) => self.halt_name(h),
        }
    }

    #[inline]
    fn index(&self, state: StateId, symbol: SymbolId) -> usize {
        state as usize * self.symbols.len() + symbol as usize
    }

    #[inline]
    pub fn transition(&self, state: StateId, symbol: SymbolId) -> Option<Transition> {
        self.table[self.index(state, symbol)]
    }

    /// Looks a transition up by state and symbol names.
    pub fn transition_by_name(&self, state: &str, symbol: &str) -> Option<Transition> {
        let s = self.state_id(state)?;
        let a = self.symbol_id(symbol)?;
        self.transition(s, a)
    }

    /// Defined transitions in (state, symbol) declaration order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, SymbolId, Transition)> + '_ {
        let width = self.symbols.len();
        self.table.iter().enumerate().filter_map(move |(i, t)| {
            t.map(|t| ((i / width) as StateId, (i % width) as SymbolId, t))
        })
    }

    pub fn rules(&self) -> Vec<Rule> {
        self.transitions()
            .map(|(s, a, t)| {
                Rule::new(
                    self.state_name(s),
                    self.symbol_name(a),
                    self.symbol_name(t.write),
                    t.direction,
                    self.target_name(t.next),
                )
            })
            .collect()
    }

    pub fn num_transitions(&self) -> usize {
        self.table.iter().filter(|t| t.is_some()).count()
    }

    /// Cells of the states x symbols grid with no transition.
    pub fn undefined_cells(&self) -> Vec<(StateId, SymbolId)> {
        let width = self.symbols.len();
        self.table
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_none())
            .map(|(i, _)| ((i / width) as StateId, (i % width) as SymbolId))
            .collect()
    }

    pub fn is_total(&self) -> bool {
        self.table.iter().all(Option::is_some)
    }

    pub fn halt_transition_count(&self) -> usize {
        self.transitions()
            .filter(|(_, _, t)| matches!(t.next, Target::Halt(_)))
            .count()
    }

    /// Renders a transition in the compact table notation, e.g. `1RA`.
    pub fn transition_label(&self, t: Transition) -> String {
        format!(
            "{}{}{}",
            self.symbol_name(t.write),
            t.direction,
            self.target_name(t.next)
        )
    }

    /// True when every symbol name is a single character, so words can be
    /// written without separators.
    pub fn has_char_symbols(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Splits a word into symbol ids. Single-character alphabets read one
    /// symbol per character; otherwise symbols are whitespace separated.
    pub fn parse_word(&self, word: &str) -> Result<Vec<SymbolId>, String> {
        let lookup = |tok: &str| self.symbol_id(tok).ok_or_else(|| tok.to_owned());
        if self.has_char_symbols() {
            let mut buf = [0u8; 4];
            word.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| lookup(c.encode_utf8(&mut buf)))
                .collect()
        } else {
            word.split_whitespace().map(lookup).collect()
        }
    }

    pub fn render_word(&self, word: &[SymbolId]) -> String {
        let sep = if self.has_char_symbols() { "" } else { " " };
        word.iter()
            .map(|&s| self.symbol_name(s))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

fn position(names: &[String], name: &str) -> Option<usize> {
    names.iter().position(|n| n == name)
}

fn check_unique(
    names: &[String],
    err: impl Fn(String) -> MachineError,
) -> Result<(), MachineError> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(err(n.clone()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn tiny(rules: &[Rule]) -> Result<MachineSpec, MachineError> {
        MachineSpec::new(
            "tiny",
            strings(&["A", "B"]),
            strings(&["0", "1"]),
            "0",
            "A",
            strings(&["H"]),
            rules,
        )
    }

    #[test]
    fn builds_table_and_looks_up() {
        let m = tiny(&[
            Rule::new("A", "0", "1", Direction::Right, "B"),
            Rule::new("B", "1", "0", Direction::Left, "H"),
        ])
        .unwrap();
        let t = m.transition_by_name("A", "0").unwrap();
        assert_eq!(m.transition_label(t), "1RB");
        assert_eq!(m.halt_transition_count(), 1);
        assert_eq!(m.undefined_cells().len(), 2);
        assert!(!m.is_total());
    }

    #[test]
    fn rejects_duplicate_rule() {
        let err = tiny(&[
            Rule::new("A", "0", "1", Direction::Right, "B"),
            Rule::new("A", "0", "0", Direction::Left, "A"),
        ])
        .unwrap_err();
        assert!(matches!(err, MachineError::DuplicateRule { .. }));
    }

    #[test]
    fn rejects_unknown_names() {
        let err = tiny(&[Rule::new("A", "0", "7", Direction::Right, "B")]).unwrap_err();
        assert_eq!(err, MachineError::UnknownSymbol("7".into()));
        let err = tiny(&[Rule::new("A", "0", "1", Direction::Right, "Q")]).unwrap_err();
        assert_eq!(err, MachineError::UnknownTarget("Q".into()));
    }

    #[test]
    fn rejects_overlapping_halt_state() {
        let err = MachineSpec::new(
            "bad",
            strings(&["A", "H"]),
            strings(&["0"]),
            "0",
            "A",
            strings(&["H"]),
            &[],
        )
        .unwrap_err();
        assert_eq!(err, MachineError::HaltStateOverlap("H".into()));
    }

    #[test]
    fn parses_words() {
        let m = tiny(&[]).unwrap();
        assert_eq!(m.parse_word("101").unwrap(), vec![1, 0, 1]);
        assert_eq!(m.parse_word("1x").unwrap_err(), "x");
        assert_eq!(m.render_word(&[1, 1, 0]), "110");
    }
}
