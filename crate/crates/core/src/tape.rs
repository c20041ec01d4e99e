//! Two-way infinite tape and machine configurations.

use std::fmt;

use crate::machine::{HaltId, MachineSpec, StateId, SymbolId};

/// A bi-infinite tape. Cells outside the allocated window read as blank.
///
/// `cells[0]` sits at absolute index `origin`; the window grows on demand
/// in either direction.
#[derive(Debug, Clone)]
pub struct Tape {
    cells: Vec<SymbolId>,
    origin: i64,
    blank: SymbolId,
}

impl Tape {
    pub fn blank(blank: SymbolId) -> Self {
        Tape {
            cells: Vec::new(),
            origin: 0,
            blank,
        }
    }

    /// A tape holding `word` starting at index 0.
    pub fn from_word(word: &[SymbolId], blank: SymbolId) -> Self {
        Tape {
            cells: word.to_vec(),
            origin: 0,
            blank,
        }
    }

    /// A tape holding `word` with its first cell at `start`.
    pub fn from_word_at(word: &[SymbolId], start: i64, blank: SymbolId) -> Self {
        Tape {
            cells: word.to_vec(),
            origin: start,
            blank,
        }
    }

    pub fn blank_symbol(&self) -> SymbolId {
        self.blank
    }

    #[inline]
    pub fn get(&self, index: i64) -> SymbolId {
        let rel = index - self.origin;
        if rel < 0 || rel >= self.cells.len() as i64 {
            self.blank
        } else {
            self.cells[rel as usize]
        }
    }

    #[inline]
    pub fn set(&mut self, index: i64, symbol: SymbolId) {
        let rel = index - self.origin;
        if rel >= 0 && rel < self.cells.len() as i64 {
            self.cells[rel as usize] = symbol;
            return;
        }
        if symbol == self.blank {
            return;
        }
        self.grow_to(index);
        self.cells[(index - self.origin) as usize] = symbol;
    }

    fn grow_to(&mut self, index: i64) {
        if self.cells.is_empty() {
            self.origin = index;
            self.cells.push(self.blank);
            return;
        }
        let len = self.cells.len() as i64;
        if index < self.origin {
            let need = self.origin - index;
            let extra = need.max(len).max(16) as usize;
            let mut grown = vec![self.blank; extra];
            grown.extend_from_slice(&self.cells);
            self.cells = grown;
            self.origin -= extra as i64;
        } else {
            let need = index - (self.origin + len) + 1;
            let extra = need.max(len).max(16) as usize;
            self.cells.resize(self.cells.len() + extra, self.blank);
        }
    }

    /// Leftmost non-blank cell index, if any.
    pub fn leftmost(&self) -> Option<i64> {
        self.cells
            .iter()
            .position(|&c| c != self.blank)
            .map(|i| self.origin + i as i64)
    }

    /// Rightmost non-blank cell index, if any.
    pub fn rightmost(&self) -> Option<i64> {
        self.cells
            .iter()
            .rposition(|&c| c != self.blank)
            .map(|i| self.origin + i as i64)
    }

    /// Inclusive bounds of the non-blank support.
    pub fn bounds(&self) -> Option<(i64, i64)> {
        Some((self.leftmost()?, self.rightmost()?))
    }

    /// Cells in `lo..=hi`, blanks included.
    pub fn slice(&self, lo: i64, hi: i64) -> Vec<SymbolId> {
        (lo..=hi).map(|i| self.get(i)).collect()
    }

    /// The non-blank support, from leftmost to rightmost non-blank cell.
    pub fn support(&self) -> Vec<SymbolId> {
        match self.bounds() {
            Some((lo, hi)) => self.slice(lo, hi),
            None => Vec::new(),
        }
    }

    /// True when every cell strictly left of `index` is blank.
    pub fn blank_left_of(&self, index: i64) -> bool {
        let end = (index - self.origin).clamp(0, self.cells.len() as i64) as usize;
        self.cells[..end].iter().rev().all(|&c| c == self.blank)
    }

    /// True when every cell strictly right of `index` is blank.
    pub fn blank_right_of(&self, index: i64) -> bool {
        let start = (index + 1 - self.origin).clamp(0, self.cells.len() as i64) as usize;
        self.cells[start..].iter().all(|&c| c == self.blank)
    }

    /// Shifts every cell by `offset`.
    pub fn translate(&mut self, offset: i64) {
        self.origin += offset;
    }

    /// Allocated window, for callers that want raw access.
    pub(crate) fn raw_parts(&self) -> (&[SymbolId], i64) {
        (&self.cells, self.origin)
    }
}

/// Tapes compare by content: allocated blank padding is irrelevant.
impl PartialEq for Tape {
    fn eq(&self, other: &Self) -> bool {
        self.blank == other.blank
            && self.bounds() == other.bounds()
            && self.support() == other.support()
    }
}

impl Eq for Tape {}

/// Control component of a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ControlState {
    Running(StateId),
    Halted(HaltId),
}

impl ControlState {
    pub fn running(self) -> Option<StateId> {
        match self {
            ControlState::Running(s) => Some(s),
            ControlState::Halted(_) => None,
        }
    }

    pub fn name(self, machine: &MachineSpec) -> &str {
        match self {
            ControlState::Running(s) => machine.state_name(s),
            ControlState::Halted(h) => machine.halt_name(h),
        }
    }
}

/// Total machine state: tape, head position, control state and the number
/// of steps taken to get here.
///
/// Equality is up to translation (see [`CanonicalConfig`]); `steps` does not
/// take part in it.
#[derive(Debug, Clone)]
pub struct Configuration {
    pub tape: Tape,
    pub head: i64,
    pub state: ControlState,
    pub steps: u64,
}

/// Translation-free form of a configuration: the leftmost non-blank cell sits
/// at index 0 (an all-blank tape puts the head at 0).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalConfig {
    pub state: ControlState,
    pub cells: Vec<SymbolId>,
    pub head: i64,
}

impl Configuration {
    pub fn new(tape: Tape, head: i64, state: ControlState) -> Self {
        Configuration {
            tape,
            head,
            state,
            steps: 0,
        }
    }

    pub fn is_halted(&self) -> bool {
        matches!(self.state, ControlState::Halted(_))
    }

    #[inline]
    pub fn read(&self) -> SymbolId {
        self.tape.get(self.head)
    }

    pub fn canonical(&self) -> CanonicalConfig {
        match self.tape.leftmost() {
            Some(lo) => CanonicalConfig {
                state: self.state,
                cells: self.tape.support(),
                head: self.head - lo,
            },
            None => CanonicalConfig {
                state: self.state,
                cells: Vec::new(),
                head: 0,
            },
        }
    }

    /// Head position relative to the leftmost non-blank cell.
    pub fn canonical_head(&self) -> i64 {
        self.tape.leftmost().map_or(0, |lo| self.head - lo)
    }

    pub fn translated(&self, offset: i64) -> Self {
        let mut c = self.clone();
        c.tape.translate(offset);
        c.head += offset;
        c
    }

    /// Equality including absolute cell positions and step count.
    pub fn exactly_eq(&self, other: &Self) -> bool {
        self.head == other.head
            && self.state == other.state
            && self.steps == other.steps
            && self.tape == other.tape
    }

    /// Renders the configuration in `^ω b w (S a) w' b^ω` notation, e.g.
    /// `^ω b0(A1)b^ω`.
    pub fn display<'a>(&'a self, machine: &'a MachineSpec) -> ConfigDisplay<'a> {
        ConfigDisplay {
            config: self,
            machine,
        }
    }

    /// Parses the inner part of the `^ω` notation, e.g. `b0(A1)b` or
    /// `0(A1)10`. Symbols outside the parentheses must be single characters;
    /// the state name is everything inside the parentheses except the last
    /// character, which is the scanned symbol. Surrounding blanks are optional.
    pub fn parse_display(machine: &MachineSpec, text: &str) -> Result<Self, String> {
        let text = text
            .trim()
            .trim_start_matches("^ω")
            .trim_end_matches("^ω")
            .trim();
        let open = text.find('(').ok_or("missing `(`")?;
        let close = text.find(')').ok_or("missing `)`")?;
        if close < open + 2 {
            return Err("head marker must be `(<state><symbol>)`".into());
        }
        let inner = &text[open + 1..close];
        let (scanned_at, scanned) = inner.char_indices().last().ok_or("empty head marker")?;
        let state_name = &inner[..scanned_at];
        let state = machine
            .state_id(state_name)
            .map(ControlState::Running)
            .or_else(|| machine.halt_id(state_name).map(ControlState::Halted))
            .ok_or_else(|| format!("unknown state `{state_name}`"))?;
        let sym = |c: char| {
            machine
                .symbol_id(c.encode_utf8(&mut [0u8; 4]))
                .ok_or_else(|| format!("unknown symbol `{c}`"))
        };
        let left: Vec<SymbolId> = text[..open].chars().map(sym).collect::<Result<_, _>>()?;
        let head_sym = sym(scanned)?;
        let right: Vec<SymbolId> = text[close + 1..]
            .chars()
            .map(sym)
            .collect::<Result<_, _>>()?;
        let mut word = left.clone();
        word.push(head_sym);
        word.extend(right);
        let tape = Tape::from_word(&word, machine.blank());
        Ok(Configuration::new(tape, left.len() as i64, state))
    }
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for Configuration {}

pub struct ConfigDisplay<'a> {
    config: &'a Configuration,
    machine: &'a MachineSpec,
}

impl fmt::Display for ConfigDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.config;
        let m = self.machine;
        let (lo, hi) = match c.tape.bounds() {
            Some((lo, hi)) => (lo.min(c.head), hi.max(c.head)),
            None => (c.head, c.head),
        };
        let blank = m.symbol_name(m.blank());
        write!(f, "^ω {blank}")?;
        for i in lo..=hi {
            let s = m.symbol_name(c.tape.get(i));
            if i == c.head {
                write!(f, "({}{})", c.state.name(m), s)?;
            } else {
                f.write_str(s)?;
            }
        }
        write!(f, "{blank}^ω")
    }
}
