//! Text format for machine definitions.
//!
//! ```text
//! machine M1
//! blank b
//! start A
//! halt H            (optional)
//! A b -> b L C
//! ...
//! ```
//!
//! States are the rule source states in order of first appearance. Symbols
//! are the blank followed by the rule read symbols in order of first
//! appearance. Write symbols and target states must be declared that way
//! (targets may also be halting states). Cells with no transition simply have
//! no line. `#` starts a comment.

use thiserror::Error;

use crate::machine::{Direction, MachineError, MachineSpec, Rule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("invalid direction `{0}` (expected L or R)")]
    InvalidDirection(String),
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error("duplicate rule for ({state}, {symbol}): machine would be nondeterministic")]
    DuplicateRule { state: String, symbol: String },
    #[error("write symbol `{0}` is not declared")]
    UndeclaredSymbol(String),
    #[error("target state `{0}` is not declared")]
    UndeclaredState(String),
    #[error(transparent)]
    Invalid(#[from] MachineError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

/// A whitespace-separated token and its 1-based column.
#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &line[s..i],
                    column: line[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: line[..s].chars().count() + 1,
        });
    }
    out
}

struct PendingRule<'a> {
    line: usize,
    tokens: [Token<'a>; 5],
    direction: Direction,
}

pub fn parse_machine(source: &str) -> Result<MachineSpec, ParseError> {
    let err = |line: usize, column: usize, kind: ParseErrorKind| ParseError { line, column, kind };

    let mut name: Option<&str> = None;
    let mut blank: Option<&str> = None;
    let mut start: Option<&str> = None;
    let mut halts: Vec<String> = Vec::new();
    let mut rules: Vec<PendingRule> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokenize(content);
        let Some(first) = toks.first() else { continue };

        match first.text {
            "machine" | "blank" | "start" if !rules.is_empty() => {
                return Err(err(
                    line_no,
                    first.column,
                    ParseErrorKind::Syntax(format!("`{}` header after rules", first.text)),
                ));
            }
            "machine" | "blank" | "start" => {
                if toks.len() != 2 {
                    return Err(err(
                        line_no,
                        first.column,
                        ParseErrorKind::Syntax(format!("`{}` takes exactly one value", first.text)),
                    ));
                }
                let slot = match first.text {
                    "machine" => &mut name,
                    "blank" => &mut blank,
                    _ => &mut start,
                };
                if slot.is_some() {
                    return Err(err(
                        line_no,
                        first.column,
                        ParseErrorKind::Syntax(format!("repeated `{}` header", first.text)),
                    ));
                }
                *slot = Some(toks[1].text);
            }
            "halt" => {
                if !rules.is_empty() {
                    return Err(err(
                        line_no,
                        first.column,
                        ParseErrorKind::Syntax("`halt` header after rules".into()),
                    ));
                }
                if toks.len() < 2 {
                    return Err(err(
                        line_no,
                        first.column,
                        ParseErrorKind::Syntax("`halt` needs at least one state".into()),
                    ));
                }
                halts.extend(toks[1..].iter().map(|t| t.text.to_owned()));
            }
            _ => {
                if toks.len() != 6 || toks[2].text != "->" {
                    return Err(err(
                        line_no,
                        first.column,
                        ParseErrorKind::Syntax(
                            "expected `<state> <symbol> -> <write> <L|R> <state>`".into(),
                        ),
                    ));
                }
                let dir_tok = toks[4];
                let direction = Direction::from_token(dir_tok.text).ok_or_else(|| {
                    err(
                        line_no,
                        dir_tok.column,
                        ParseErrorKind::InvalidDirection(dir_tok.text.to_owned()),
                    )
                })?;
                rules.push(PendingRule {
                    line: line_no,
                    tokens: [toks[0], toks[1], toks[3], toks[4], toks[5]],
                    direction,
                });
            }
        }
    }

    let eof = last_line + 1;
    let name = name.ok_or_else(|| err(eof, 1, ParseErrorKind::MissingHeader("machine")))?;
    let blank = blank.ok_or_else(|| err(eof, 1, ParseErrorKind::MissingHeader("blank")))?;
    let start = start.ok_or_else(|| err(eof, 1, ParseErrorKind::MissingHeader("start")))?;

    // declaration order: first appearance as a rule source / read symbol
    let mut states: Vec<String> = Vec::new();
    let mut symbols: Vec<String> = vec![blank.to_owned()];
    for r in &rules {
        let [state, read, ..] = r.tokens;
        if !states.iter().any(|s| s == state.text) {
            states.push(state.text.to_owned());
        }
        if !symbols.iter().any(|s| s == read.text) {
            symbols.push(read.text.to_owned());
        }
    }

    let mut seen = std::collections::HashSet::new();
    for r in &rules {
        let [state, read, write, _, next] = r.tokens;
        if !seen.insert((state.text, read.text)) {
            return Err(err(
                r.line,
                state.column,
                ParseErrorKind::DuplicateRule {
                    state: state.text.to_owned(),
                    symbol: read.text.to_owned(),
                },
            ));
        }
        if !symbols.iter().any(|s| s == write.text) {
            return Err(err(
                r.line,
                write.column,
                ParseErrorKind::UndeclaredSymbol(write.text.to_owned()),
            ));
        }
        if !states.iter().any(|s| s == next.text) && !halts.iter().any(|h| h == next.text) {
            return Err(err(
                r.line,
                next.column,
                ParseErrorKind::UndeclaredState(next.text.to_owned()),
            ));
        }
    }

    let named: Vec<Rule> = rules
        .iter()
        .map(|r| {
            let [state, read, write, _, next] = r.tokens;
            Rule::new(state.text, read.text, write.text, r.direction, next.text)
        })
        .collect();
    MachineSpec::new(name, states, symbols, blank, start, halts, &named)
        .map_err(|e| err(eof, 1, ParseErrorKind::Invalid(e)))
}

/// Canonical text for `machine`: headers, then one rule per defined cell in
/// (state, symbol) declaration order, LF line endings.
pub fn format_machine(machine: &MachineSpec) -> String {
    let mut out = String::new();
    out.push_str(&format!("machine {}\n", machine.name()));
    out.push_str(&format!(
        "blank {}\n",
        machine.symbol_name(machine.blank())
    ));
    out.push_str(&format!(
        "start {}\n",
        machine.state_name(machine.start())
    ));
    if !machine.halt_states().is_empty() {
        out.push_str(&format!("halt {}\n", machine.halt_states().join(" ")));
    }
    for r in machine.rules() {
        out.push_str(&format!(
            "{} {} -> {} {} {}\n",
            r.state, r.read, r.write, r.direction, r.next
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "machine T\nblank 0\nstart A\nhalt H\nA 0 -> 1 R B\nB 0 -> 0 L A\nB 1 -> 1 L H\n";

    #[test]
    fn parses_small_machine() {
        let m = parse_machine(SMALL).unwrap();
        assert_eq!(m.name(), "T");
        assert_eq!(m.states(), ["A", "B"]);
        assert_eq!(m.symbols(), ["0", "1"]);
        assert_eq!(m.halt_states(), ["H"]);
        let t = m.transition_by_name("A", "0").unwrap();
        assert_eq!(m.transition_label(t), "1RB");
        assert_eq!(format_machine(&m), SMALL);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let src = "# demo\nmachine T\n\nblank 0 # the blank\nstart A\nA 0 -> 0 R A # loop\n";
        let m = parse_machine(src).unwrap();
        assert_eq!(m.num_transitions(), 1);
    }

    #[test]
    fn invalid_direction_reports_column() {
        let src = "machine T\nblank 0\nstart A\nA 0 -> 1 X A\n";
        let e = parse_machine(src).unwrap_err();
        assert_eq!(e.line, 4);
        assert_eq!(e.column, 10);
        assert_eq!(e.kind, ParseErrorKind::InvalidDirection("X".into()));
    }

    #[test]
    fn duplicate_rule_is_rejected() {
        let src = "machine T\nblank 0\nstart A\nA 0 -> 0 R A\nA 0 -> 0 L A\n";
        let e = parse_machine(src).unwrap_err();
        assert_eq!(e.line, 5);
        assert!(matches!(e.kind, ParseErrorKind::DuplicateRule { .. }));
    }

    #[test]
    fn missing_headers() {
        let e = parse_machine("blank 0\nstart A\nA 0 -> 0 R A\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingHeader("machine"));
        let e = parse_machine("machine T\nstart A\nA 0 -> 0 R A\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingHeader("blank"));
        let e = parse_machine("machine T\nblank 0\nA 0 -> 0 R A\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingHeader("start"));
    }

    #[test]
    fn undeclared_names() {
        let e = parse_machine("machine T\nblank 0\nstart A\nA 0 -> 7 R A\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndeclaredSymbol("7".into()));
        assert_eq!(e.column, 8);
        let e = parse_machine("machine T\nblank 0\nstart A\nA 0 -> 0 R Q\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndeclaredState("Q".into()));
    }

    #[test]
    fn malformed_rule_line() {
        let e = parse_machine("machine T\nblank 0\nstart A\nA 0 => 0 R A\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        let e = parse_machine("machine T\nblank 0\nstart A\nA 0 -> 0 R\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn start_must_have_rules() {
        let e = parse_machine("machine T\nblank 0\nstart B\nA 0 -> 0 R A\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Invalid(MachineError::UnknownStart(_))));
    }

    #[test]
    fn halt_state_cannot_have_rules() {
        let src = "machine T\nblank 0\nstart A\nhalt A\nA 0 -> 0 R A\n";
        let e = parse_machine(src).unwrap_err();
        assert!(matches!(
            e.kind,
            ParseErrorKind::Invalid(MachineError::HaltStateOverlap(_))
        ));
    }
}
