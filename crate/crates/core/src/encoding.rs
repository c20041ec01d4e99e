//! Integer encodings for each machine family and the checkpoint templates
//! that read the current iterate back off the tape.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::machine::{MachineSpec, StateId, SymbolId};
use crate::tape::ControlState;
use crate::view::ConfigView;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("value must be a positive integer")]
    NotPositive,
    #[error("empty word")]
    Empty,
    #[error("invalid character `{ch}` at position {pos}")]
    BadDigit { ch: char, pos: usize },
    #[error("binary-pair word has odd length {0}")]
    OddLength(usize),
    #[error("binary-pair separator at position {0} is not 1")]
    BadSeparator(usize),
    #[error("word encodes zero")]
    Zero,
    #[error("value does not fit in 64 bits")]
    Overflow,
    #[error("machine {machine} lacks `{name}` needed by the {template} template")]
    MissingName {
        machine: String,
        name: String,
        template: TemplateId,
    },
}

/// Number representations used by the machine families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    /// Base 3, most significant digit first (M1, M6).
    Base3,
    /// `n` as a string of `n` ones (M2–M5).
    Unary,
    /// Binary, least significant bit first, each bit `x` coded as `1x`
    /// (M7, M8).
    BinaryPair,
}

impl Representation {
    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Base3 => "base3",
            Representation::Unary => "unary",
            Representation::BinaryPair => "binary-pair",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Representation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "base3" => Ok(Representation::Base3),
            "unary" => Ok(Representation::Unary),
            "binary-pair" => Ok(Representation::BinaryPair),
            _ => Err(format!("unknown representation `{s}` (base3, unary, binary-pair)")),
        }
    }
}

pub fn encode(value: u64, repr: Representation) -> Result<String, EncodingError> {
    if value == 0 {
        return Err(EncodingError::NotPositive);
    }
    Ok(match repr {
        Representation::Base3 => {
            let mut digits = Vec::new();
            let mut v = value;
            while v > 0 {
                digits.push(b'0' + (v % 3) as u8);
                v /= 3;
            }
            digits.reverse();
            String::from_utf8(digits).expect("ascii digits")
        }
        Representation::Unary => "1".repeat(value as usize),
        Representation::BinaryPair => {
            let bits = 64 - value.leading_zeros();
            (0..bits)
                .map(|i| if value >> i & 1 == 1 { "11" } else { "10" })
                .collect()
        }
    })
}

pub fn decode(word: &str, repr: Representation) -> Result<u64, EncodingError> {
    if word.is_empty() {
        return Err(EncodingError::Empty);
    }
    let value = match repr {
        Representation::Base3 => {
            let mut v: u64 = 0;
            for (pos, ch) in word.chars().enumerate() {
                let d = ch
                    .to_digit(3)
                    .ok_or(EncodingError::BadDigit { ch, pos })?;
                v = v
                    .checked_mul(3)
                    .and_then(|v| v.checked_add(d as u64))
                    .ok_or(EncodingError::Overflow)?;
            }
            v
        }
        Representation::Unary => {
            if let Some((pos, ch)) = word.char_indices().find(|&(_, c)| c != '1') {
                return Err(EncodingError::BadDigit { ch, pos });
            }
            word.len() as u64
        }
        Representation::BinaryPair => {
            let chars: Vec<char> = word.chars().collect();
            if !chars.len().is_multiple_of(2) {
                return Err(EncodingError::OddLength(chars.len()));
            }
            let mut v: u64 = 0;
            for (i, pair) in chars.chunks(2).enumerate() {
                if pair[0] != '1' {
                    return Err(EncodingError::BadSeparator(2 * i));
                }
                match pair[1] {
                    '0' => {}
                    '1' if i < 64 => v |= 1 << i,
                    '1' => return Err(EncodingError::Overflow),
                    ch => return Err(EncodingError::BadDigit { ch, pos: 2 * i + 1 }),
                }
            }
            v
        }
    };
    if value == 0 {
        return Err(EncodingError::Zero);
    }
    Ok(value)
}

/// How checkpoint values must relate to the oracle trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComparisonMode {
    /// Checkpoints appear in order but iterates may be skipped.
    OrderedSubsequence,
    /// Every iterate appears, in order, with nothing in between.
    ExactTrajectory,
}

impl fmt::Display for ComparisonMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComparisonMode::OrderedSubsequence => "ordered-subsequence",
            ComparisonMode::ExactTrajectory => "exact-trajectory",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TemplateId {
    /// M1: state A on the leftmost non-blank cell, base-3 digits to the
    /// right.
    Base3Pass,
    /// M6: as `Base3Pass` but passes start in state D; state A only at the
    /// initial configuration.
    Base3Wiping,
    /// M2/M3: state A on the first 1 of a block of 1s that runs to the right
    /// end of the tape, blank to its left; residue of `x` further left.
    UnaryXResidue,
    /// M4/M5: as `UnaryXResidue` with residue of `a` and `x`.
    UnaryAxResidue,
    /// M7/M8: state A reading the leading 1, blank to the left, pairs
    /// `1x` to the right.
    BinaryPair,
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TemplateId::Base3Pass => "base3-pass",
            TemplateId::Base3Wiping => "base3-wiping",
            TemplateId::UnaryXResidue => "unary-x-residue",
            TemplateId::UnaryAxResidue => "unary-ax-residue",
            TemplateId::BinaryPair => "binary-pair",
        })
    }
}

impl TemplateId {
    /// Mode the verifier requires by default.
    pub fn default_mode(self) -> ComparisonMode {
        match self {
            TemplateId::Base3Pass | TemplateId::Base3Wiping => ComparisonMode::ExactTrajectory,
            _ => ComparisonMode::OrderedSubsequence,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Extractor {
    /// Digits `0`, `1`, `2` in value order.
    Base3 { digits: [SymbolId; 3] },
    Unary { one: SymbolId, residue: Vec<SymbolId> },
    BinaryPair { zero: SymbolId, one: SymbolId },
}

/// A machine-specific pattern recognising "the tape now encodes m", with the
/// extractor that reads m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckpointTemplate {
    pub id: TemplateId,
    /// States at which a checkpoint fires anywhere in the run.
    pub state_set: Vec<StateId>,
    /// State that fires only on the initial (step 0) configuration.
    pub initial_state: Option<StateId>,
    pub mode: ComparisonMode,
    extractor: Extractor,
}

impl CheckpointTemplate {
    pub fn new(id: TemplateId, machine: &MachineSpec) -> Result<Self, EncodingError> {
        let missing = |name: &str| EncodingError::MissingName {
            machine: machine.name().to_owned(),
            name: name.to_owned(),
            template: id,
        };
        let state = |name: &str| machine.state_id(name).ok_or_else(|| missing(name));
        let symbol = |name: &str| machine.symbol_id(name).ok_or_else(|| missing(name));
        let base3 = || -> Result<Extractor, EncodingError> {
            Ok(Extractor::Base3 {
                digits: [symbol("0")?, symbol("1")?, symbol("2")?],
            })
        };
        let (state_set, initial_state, extractor) = match id {
            TemplateId::Base3Pass => (vec![state("A")?], None, base3()?),
            TemplateId::Base3Wiping => (vec![state("D")?], Some(state("A")?), base3()?),
            TemplateId::UnaryXResidue => (
                vec![state("A")?],
                None,
                Extractor::Unary {
                    one: symbol("1")?,
                    residue: vec![symbol("x")?],
                },
            ),
            TemplateId::UnaryAxResidue => (
                vec![state("A")?],
                None,
                Extractor::Unary {
                    one: symbol("1")?,
                    residue: vec![symbol("a")?, symbol("x")?],
                },
            ),
            TemplateId::BinaryPair => (
                vec![state("A")?],
                None,
                Extractor::BinaryPair {
                    zero: symbol("0")?,
                    one: symbol("1")?,
                },
            ),
        };
        Ok(CheckpointTemplate {
            id,
            state_set,
            initial_state,
            mode: id.default_mode(),
            extractor,
        })
    }

    fn state_matches<V: ConfigView>(&self, view: &V) -> bool {
        let ControlState::Running(s) = view.state() else {
            return false;
        };
        self.state_set.contains(&s) || (self.initial_state == Some(s) && view.steps() == 0)
    }

    /// The integer encoded by `view`, if it matches the template.
    pub fn checkpoint<V: ConfigView>(&self, view: &V) -> Option<u64> {
        if !self.state_matches(view) {
            return None;
        }
        let scanned = view.scanned();
        let blank = view.blank();
        match &self.extractor {
            Extractor::Base3 { digits } => {
                if scanned == blank || !view.blank_left() {
                    return None;
                }
                let mut v: u64 = 0;
                for (sym, n) in view.runs_right() {
                    let d = digits.iter().position(|&d| d == sym)? as u64;
                    for _ in 0..n {
                        v = v.checked_mul(3)?.checked_add(d)?;
                    }
                }
                (v > 0).then_some(v)
            }
            Extractor::Unary { one, residue } => {
                if scanned != *one || view.left_neighbor() != blank {
                    return None;
                }
                if !view
                    .runs_left()
                    .all(|(s, _)| s == blank || residue.contains(&s))
                {
                    return None;
                }
                let mut count = 0u64;
                for (sym, n) in view.runs_right() {
                    if sym != *one {
                        return None;
                    }
                    count += n;
                }
                Some(count)
            }
            Extractor::BinaryPair { zero, one } => {
                if scanned != *one || !view.blank_left() {
                    return None;
                }
                let mut cells = view
                    .runs_right()
                    .flat_map(|(s, n)| std::iter::repeat_n(s, n as usize));
                let mut v: u64 = 0;
                let mut bit = 0u32;
                while let Some(sep) = cells.next() {
                    if sep != *one {
                        return None;
                    }
                    // a missing final digit is blank, i.e. 0
                    let d = cells.next().unwrap_or(*zero);
                    if d == *one {
                        if bit >= 64 {
                            return None;
                        }
                        v |= 1 << bit;
                    } else if d != *zero {
                        return None;
                    }
                    bit += 1;
                }
                (v > 0).then_some(v)
            }
        }
    }
}

/// Recognises `^ω b 0^n (A1) b^ω` and returns `n`.
pub fn theorem1_target<V: ConfigView>(machine: &MachineSpec, view: &V) -> Option<u64> {
    let a = machine.state_id("A")?;
    let zero = machine.symbol_id("0")?;
    let one = machine.symbol_id("1")?;
    if view.state() != ControlState::Running(a) || view.scanned() != one || !view.blank_right() {
        return None;
    }
    let mut n = 0u64;
    for (sym, len) in view.runs_left() {
        if sym != zero {
            return None;
        }
        n += len;
    }
    Some(n)
}
