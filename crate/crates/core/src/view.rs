//! Read-only access to a configuration, shared by the plain and the
//! run-length encoded engines so checkpoint extractors work on both.

use crate::machine::SymbolId;
use crate::tape::{Configuration, ControlState};

/// A maximal-or-not run of identical cells. Consumers must not assume
/// adjacent runs have different symbols.
pub type Run = (SymbolId, u64);

pub trait ConfigView {
    type Runs<'a>: Iterator<Item = Run>
    where
        Self: 'a;

    fn state(&self) -> ControlState;
    fn steps(&self) -> u64;
    fn blank(&self) -> SymbolId;
    fn scanned(&self) -> SymbolId;

    /// Cells from the head (inclusive) rightwards to the rightmost non-blank
    /// cell. The head cell is always the first run, of length 1.
    fn runs_right(&self) -> Self::Runs<'_>;

    /// Cells strictly left of the head, moving left, up to the leftmost
    /// non-blank cell. Empty when everything left of the head is blank.
    fn runs_left(&self) -> Self::Runs<'_>;

    fn left_neighbor(&self) -> SymbolId {
        self.runs_left().next().map_or(self.blank(), |(s, _)| s)
    }

    /// True when every cell left of the head is blank.
    fn blank_left(&self) -> bool {
        let blank = self.blank();
        self.runs_left().all(|(s, _)| s == blank)
    }

    /// True when every cell right of the head is blank.
    fn blank_right(&self) -> bool {
        let blank = self.blank();
        self.runs_right().skip(1).all(|(s, _)| s == blank)
    }
}

/// Run iterator over a plain tape window.
pub struct CellRuns<'a> {
    cells: &'a [SymbolId],
    // next index to read; moves by `step`
    pos: isize,
    step: isize,
    blank: SymbolId,
    // emitted before the window cells: the head cell, then a blank gap
    // between the head and the window
    prefix: [Option<Run>; 2],
}

impl Iterator for CellRuns<'_> {
    type Item = Run;

    fn next(&mut self) -> Option<Run> {
        if let Some(run) = self.prefix.iter_mut().find_map(Option::take) {
            return Some(run);
        }
        let len = self.cells.len() as isize;
        if self.pos < 0 || self.pos >= len {
            return None;
        }
        let sym = self.cells[self.pos as usize];
        let mut n = 0u64;
        while self.pos >= 0 && self.pos < len && self.cells[self.pos as usize] == sym {
            self.pos += self.step;
            n += 1;
        }
        if sym == self.blank && (self.pos < 0 || self.pos >= len) {
            // trailing blanks inside the allocated window are not support
            return None;
        }
        Some((sym, n))
    }
}

impl ConfigView for Configuration {
    type Runs<'a> = CellRuns<'a>;

    fn state(&self) -> ControlState {
        self.state
    }

    fn steps(&self) -> u64 {
        self.steps
    }

    fn blank(&self) -> SymbolId {
        self.tape.blank_symbol()
    }

    fn scanned(&self) -> SymbolId {
        self.read()
    }

    fn left_neighbor(&self) -> SymbolId {
        self.tape.get(self.head - 1)
    }

    fn blank_left(&self) -> bool {
        self.tape.blank_left_of(self.head)
    }

    fn blank_right(&self) -> bool {
        self.tape.blank_right_of(self.head)
    }

    fn runs_right(&self) -> CellRuns<'_> {
        let (cells, origin) = self.tape.raw_parts();
        let len = cells.len() as i64;
        let first = self.head + 1 - origin;
        let gap = (first < 0 && self.tape.leftmost().is_some())
            .then(|| (self.tape.blank_symbol(), (-first) as u64));
        CellRuns {
            cells,
            pos: first.clamp(0, len) as isize,
            step: 1,
            blank: self.tape.blank_symbol(),
            prefix: [Some((self.read(), 1)), gap],
        }
    }

    fn runs_left(&self) -> CellRuns<'_> {
        let (cells, origin) = self.tape.raw_parts();
        let len = cells.len() as i64;
        let first = self.head - 1 - origin;
        let gap = (first >= len && self.tape.leftmost().is_some())
            .then(|| (self.tape.blank_symbol(), (first - len + 1) as u64));
        CellRuns {
            cells,
            pos: first.clamp(-1, len - 1) as isize,
            step: -1,
            blank: self.tape.blank_symbol(),
            prefix: [None, gap],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tape::Tape;

    fn config(word: &[SymbolId], head: i64) -> Configuration {
        let mut tape = Tape::from_word(word, 0);
        // padding that must not show up as support
        tape.set(-20, 9);
        tape.set(-20, 0);
        tape.set(30, 9);
        tape.set(30, 0);
        Configuration::new(tape, head, ControlState::Running(0))
    }

    #[test]
    fn runs_cover_support_only() {
        let c = config(&[1, 1, 0, 2, 2, 2], 2);
        assert_eq!(c.runs_right().collect::<Vec<_>>(), [(0, 1), (2, 3)]);
        assert_eq!(c.runs_left().collect::<Vec<_>>(), [(1, 2)]);
        assert!(!c.blank_left());
        assert_eq!(c.left_neighbor(), 1);
    }

    #[test]
    fn head_outside_window() {
        let c = config(&[1, 2], 100);
        assert_eq!(c.runs_right().collect::<Vec<_>>(), [(0, 1)]);
        let left: Vec<_> = c.runs_left().collect();
        assert_eq!(left.iter().map(|r| r.1).sum::<u64>(), 100);
        let c = config(&[1, 2], -100);
        assert!(c.blank_left());
        assert_eq!(c.runs_right().skip(1).map(|r| r.1).sum::<u64>(), 101);
    }

    #[test]
    fn interior_blanks_are_kept() {
        let c = config(&[1, 0, 0, 1], 0);
        assert_eq!(c.runs_right().collect::<Vec<_>>(), [(1, 1), (0, 2), (1, 1)]);
        assert!(c.blank_left());
        assert!(!c.blank_right());
    }
}
