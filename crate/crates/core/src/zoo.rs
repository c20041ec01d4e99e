//! The eight built-in Collatz machines, shipped as machine-definition text.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::encoding::{Representation, TemplateId};
use crate::format::{format_machine, parse_machine, ParseError};
use crate::machine::{MachineSpec, Transition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZooError {
    #[error("unknown machine `{0}` (expected one of M1..M8)")]
    UnknownMachine(String),
    #[error("built-in machine {name} failed to parse: {source}")]
    Corrupt { name: String, source: ParseError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HaltingKind {
    NeverHalting,
    HaltsOnLoop,
}

/// Which equivalence a machine witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Theorem {
    /// M1 reaches `b 0^n (A1) b` on every input.
    ReachesTarget,
    /// M3, M5, M6, M8 halt on every input.
    HaltsOnAllInputs,
}

pub struct MachineSource {
    pub name: &'static str,
    pub text: &'static str,
    pub note: &'static str,
}

pub const SOURCES: [MachineSource; 8] = [
    MachineSource {
        name: "M1",
        text: include_str!("../machines/m1.tm"),
        note: "never-halting 3x4 machine; base-3 numerals, one division by 2 per pass",
    },
    MachineSource {
        name: "M2",
        text: include_str!("../machines/m2.tm"),
        note: "never-halting 2x10 unary machine",
    },
    MachineSource {
        name: "M3",
        text: include_str!("../machines/m3.tm"),
        note: "M2 plus state C detecting (A1)b; halts on the loop",
    },
    MachineSource {
        name: "M4",
        text: include_str!("../machines/m4.tm"),
        note: "never-halting 3x6 unary machine; (A,z) writes r (corrected from x)",
    },
    MachineSource {
        name: "M5",
        text: include_str!("../machines/m5.tm"),
        note: "M4 plus state D detecting (A1)b; halts on the loop",
    },
    MachineSource {
        name: "M6",
        text: include_str!("../machines/m6.tm"),
        note: "M1 plus state D wiping leading 0s and state E detecting b(Bb)",
    },
    MachineSource {
        name: "M7",
        text: include_str!("../machines/m7.tm"),
        note: "never-halting 11x2 machine; binary, LSB first, digits coded 10/11; H is an ordinary state",
    },
    MachineSource {
        name: "M8",
        text: include_str!("../machines/m8.tm"),
        note: "M7 plus states L and M detecting (A1)10; halts in Z",
    },
];

#[derive(Debug, Clone)]
pub struct ZooEntry {
    pub machine: MachineSpec,
    pub encoding: Representation,
    pub halting_kind: HaltingKind,
    pub template: TemplateId,
    pub theorem: Option<Theorem>,
    /// Designated halting state for halts-on-loop machines.
    pub halt_state: Option<&'static str>,
    pub note: &'static str,
}

pub fn names() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|s| s.name)
}

fn source(name: &str) -> Result<&'static MachineSource, ZooError> {
    SOURCES
        .iter()
        .find(|s| s.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| ZooError::UnknownMachine(name.to_owned()))
}

/// Parses a built-in machine's source.
pub fn builtin_machine(name: &str) -> Result<MachineSpec, ZooError> {
    let src = source(name)?;
    parse_machine(src.text).map_err(|source| ZooError::Corrupt {
        name: src.name.to_owned(),
        source,
    })
}

pub fn builtin(name: &str) -> Result<ZooEntry, ZooError> {
    let src = source(name)?;
    let machine = builtin_machine(src.name)?;
    use HaltingKind::*;
    use Representation::*;
    let (encoding, halting_kind, template, theorem, halt_state) = match src.name {
        "M1" => (Base3, NeverHalting, TemplateId::Base3Pass, Some(Theorem::ReachesTarget), None),
        "M2" => (Unary, NeverHalting, TemplateId::UnaryXResidue, None, None),
        "M3" => (Unary, HaltsOnLoop, TemplateId::UnaryXResidue, Some(Theorem::HaltsOnAllInputs), Some("H")),
        "M4" => (Unary, NeverHalting, TemplateId::UnaryAxResidue, None, None),
        "M5" => (Unary, HaltsOnLoop, TemplateId::UnaryAxResidue, Some(Theorem::HaltsOnAllInputs), Some("H")),
        "M6" => (Base3, HaltsOnLoop, TemplateId::Base3Wiping, Some(Theorem::HaltsOnAllInputs), Some("H")),
        "M7" => (BinaryPair, NeverHalting, TemplateId::BinaryPair, None, None),
        "M8" => (BinaryPair, HaltsOnLoop, TemplateId::BinaryPair, Some(Theorem::HaltsOnAllInputs), Some("Z")),
        _ => unreachable!("SOURCES and this table list the same names"),
    };
    Ok(ZooEntry {
        machine,
        encoding,
        halting_kind,
        template,
        theorem,
        halt_state,
        note: src.note,
    })
}

/// One cell whose transition differs between two machines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellChange {
    pub state: String,
    pub symbol: String,
    pub before: Option<String>,
    pub after: Option<String>,
}

impl fmt::Display for CellChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |t: &Option<String>| t.clone().unwrap_or_else(|| "-".into());
        write!(
            f,
            "({},{}): {} -> {}",
            self.state,
            self.symbol,
            show(&self.before),
            show(&self.after)
        )
    }
}

/// Structural difference between a base machine and a derived one, by name.
/// Cells of added or removed states are not listed as changes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct MachineDiff {
    pub added_states: Vec<String>,
    pub removed_states: Vec<String>,
    pub added_symbols: Vec<String>,
    pub removed_symbols: Vec<String>,
    pub changed: Vec<CellChange>,
}

impl fmt::Display for MachineDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.added_states.is_empty() {
            parts.push(format!("states added: {}", self.added_states.join(" ")));
        }
        if !self.removed_states.is_empty() {
            parts.push(format!("states removed: {}", self.removed_states.join(" ")));
        }
        if !self.added_symbols.is_empty() {
            parts.push(format!("symbols added: {}", self.added_symbols.join(" ")));
        }
        if !self.removed_symbols.is_empty() {
            parts.push(format!("symbols removed: {}", self.removed_symbols.join(" ")));
        }
        for c in &self.changed {
            parts.push(c.to_string());
        }
        if parts.is_empty() {
            f.write_str("identical")
        } else {
            f.write_str(&parts.join("; "))
        }
    }
}

pub fn diff_machines(base: &MachineSpec, derived: &MachineSpec) -> MachineDiff {
    let missing = |from: &[String], other: &[String]| -> Vec<String> {
        from.iter().filter(|s| !other.contains(s)).cloned().collect()
    };
    let label = |m: &MachineSpec, t: Option<Transition>| t.map(|t| m.transition_label(t));
    let mut diff = MachineDiff {
        added_states: missing(derived.states(), base.states()),
        removed_states: missing(base.states(), derived.states()),
        added_symbols: missing(derived.symbols(), base.symbols()),
        removed_symbols: missing(base.symbols(), derived.symbols()),
        changed: Vec::new(),
    };
    for state in base.states().iter().filter(|s| derived.states().contains(s)) {
        for symbol in base.symbols().iter().filter(|s| derived.symbols().contains(s)) {
            let before = label(base, base.transition_by_name(state, symbol));
            let after = label(derived, derived.transition_by_name(state, symbol));
            if before != after {
                diff.changed.push(CellChange {
                    state: state.clone(),
                    symbol: symbol.clone(),
                    before,
                    after,
                });
            }
        }
    }
    diff
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZooCheck {
    pub machine: String,
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ZooReport {
    pub checks: Vec<ZooCheck>,
}

impl ZooReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ZooCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn record(&mut self, machine: &str, check: &str, passed: bool, detail: String) {
        self.checks.push(ZooCheck {
            machine: machine.to_owned(),
            check: check.to_owned(),
            passed,
            detail,
        });
    }
}

/// (name, states, symbols, undefined cells), halting states excluded from
/// the state count.
pub const EXPECTED_SHAPES: [(&str, usize, usize, usize); 8] = [
    ("M1", 3, 4, 0),
    ("M2", 2, 10, 1),
    ("M3", 3, 10, 8),
    ("M4", 3, 6, 1),
    ("M5", 4, 6, 4),
    ("M6", 5, 4, 1),
    ("M7", 11, 2, 1),
    ("M8", 13, 2, 1),
];

/// Checks every built-in machine: it parses, round-trips through the
/// formatter, has the published states x symbols class and undefined cells,
/// and its halting metadata agrees with its table.
pub fn validate_zoo() -> ZooReport {
    let mut report = ZooReport::default();
    for (name, states, symbols, undefined) in EXPECTED_SHAPES {
        let entry = match builtin(name) {
            Ok(e) => e,
            Err(e) => {
                report.record(name, "parse", false, e.to_string());
                continue;
            }
        };
        let m = &entry.machine;
        report.record(name, "parse", true, String::new());

        let text = source(name).map(|s| s.text).unwrap_or_default();
        let formatted = format_machine(m);
        let reparsed = parse_machine(&formatted).ok();
        report.record(
            name,
            "round-trip",
            reparsed.as_ref() == Some(m) && formatted == text,
            if formatted == text {
                String::new()
            } else {
                "shipped source is not in canonical form".into()
            },
        );

        let shape = (m.num_states(), m.num_symbols());
        report.record(
            name,
            "class",
            shape == (states, symbols),
            format!("{}x{} (expected {states}x{symbols})", shape.0, shape.1),
        );

        let blanks = m.undefined_cells();
        let cells: Vec<String> = blanks
            .iter()
            .map(|&(s, a)| format!("({},{})", m.state_name(s), m.symbol_name(a)))
            .collect();
        report.record(
            name,
            "undefined-cells",
            blanks.len() == undefined,
            format!("{} (expected {undefined}): {}", blanks.len(), cells.join(" ")),
        );

        let halts = m.halt_transition_count();
        let kind_ok = match entry.halting_kind {
            HaltingKind::NeverHalting => halts == 0 && m.halt_states().is_empty(),
            HaltingKind::HaltsOnLoop => {
                halts == 1
                    && entry
                        .halt_state
                        .is_some_and(|h| m.halt_states() == [h.to_owned()])
            }
        };
        report.record(
            name,
            "halting-kind",
            kind_ok,
            format!("{:?} with {halts} halting transition(s)", entry.halting_kind),
        );
    }
    match builtin_machine("M1") {
        Ok(m1) => report.record(
            "M1",
            "total",
            m1.is_total() && m1.num_transitions() == 12,
            format!("{} transitions", m1.num_transitions()),
        ),
        Err(e) => report.record("M1", "total", false, e.to_string()),
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_source_parses() {
        for name in names() {
            builtin(name).unwrap();
        }
        assert!(matches!(builtin("M9"), Err(ZooError::UnknownMachine(_))));
        assert_eq!(builtin("m3").unwrap().machine.name(), "M3");
    }

    #[test]
    fn m1_shape() {
        let m1 = builtin_machine("M1").unwrap();
        assert_eq!(m1.num_states(), 3);
        assert_eq!(m1.symbols(), ["b", "0", "1", "2"]);
        assert_eq!(m1.halt_transition_count(), 0);
        assert!(m1.is_total());
    }

    #[test]
    fn published_cells() {
        let m6 = builtin_machine("M6").unwrap();
        let t = m6.transition_by_name("E", "b").unwrap();
        assert_eq!(m6.transition_label(t), "bRH");
        let m8 = builtin_machine("M8").unwrap();
        let t = m8.transition_by_name("M", "0").unwrap();
        assert_eq!(m8.transition_label(t), "0LZ");
        let m4 = builtin_machine("M4").unwrap();
        let t = m4.transition_by_name("A", "z").unwrap();
        assert_eq!(m4.transition_label(t), "rRB");
    }

    #[test]
    fn m7_h_is_an_ordinary_state() {
        let m7 = builtin_machine("M7").unwrap();
        assert!(m7.state_id("H").is_some());
        assert!(m7.halt_states().is_empty());
        let m8 = builtin_machine("M8").unwrap();
        assert!(m8.state_id("H").is_some());
        assert_eq!(m8.halt_states(), ["Z"]);
    }

    #[test]
    fn m2_blank_cell_has_no_line() {
        let m2 = builtin_machine("M2").unwrap();
        assert!(m2.transition_by_name("A", "k").is_none());
        assert!(!format_machine(&m2).contains("A k ->"));
    }

    #[test]
    fn zoo_validates() {
        let report = validate_zoo();
        let failures: Vec<_> = report.failures().collect();
        assert!(failures.is_empty(), "{failures:#?}");
    }

    #[test]
    fn derived_rows_match_base_rows() {
        let m2 = builtin_machine("M2").unwrap();
        let m3 = builtin_machine("M3").unwrap();
        for sym in m2.symbols() {
            assert_eq!(
                m2.transition_by_name("B", sym).map(|t| m2.transition_label(t)),
                m3.transition_by_name("B", sym).map(|t| m3.transition_label(t)),
            );
        }
        let d = diff_machines(&m2, &m3);
        assert_eq!(d.added_states, ["C"]);
        assert_eq!(d.to_string(), "states added: C; (A,1): xRB -> xRC");
    }
}
