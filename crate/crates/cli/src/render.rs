//! Text rendering of tapes for `trace` and `run`.

use collatz_tm::machine::MachineSpec;
use collatz_tm::tape::Configuration;
use collatz_tm::view::ConfigView;

fn separator(machine: &MachineSpec) -> &'static str {
    if machine.has_char_symbols() {
        ""
    } else {
        " "
    }
}

/// The tape from the leftmost to the rightmost non-blank cell (always
/// including the head), head cell in brackets, clipped to `width` cells
/// around the head with `…` marking cut ends.
pub fn tape_window(machine: &MachineSpec, config: &Configuration, width: Option<usize>) -> String {
    let head = config.head;
    let (mut lo, mut hi) = match config.tape.bounds() {
        Some((l, r)) => (l.min(head), r.max(head)),
        None => (head, head),
    };
    let mut cut_left = false;
    let mut cut_right = false;
    if let Some(w) = width.filter(|&w| w > 0) {
        let w = w as i64;
        if hi - lo + 1 > w {
            let start = (head - (w - 1) / 2).clamp(lo, hi - w + 1);
            cut_left = start > lo;
            cut_right = start + w - 1 < hi;
            lo = start;
            hi = start + w - 1;
        }
    }
    let cells: Vec<String> = (lo..=hi)
        .map(|i| {
            let s = machine.symbol_name(config.tape.get(i));
            if i == head {
                format!("[{s}]")
            } else {
                s.to_owned()
            }
        })
        .collect();
    format!(
        "|{}{}{}|",
        if cut_left { "…" } else { "" },
        cells.join(separator(machine)),
        if cut_right { "…" } else { "" }
    )
}

/// Head position relative to the leftmost non-blank cell.
pub fn head_offset(config: &Configuration) -> i64 {
    config.canonical_head()
}

/// Compact rendering from runs, `sym^k` for long runs, e.g.
/// `^ω b x^12 b (A1) 1^5 b^ω`.
pub fn compact<V: ConfigView>(machine: &MachineSpec, view: &V) -> String {
    let blank = machine.symbol_name(view.blank());
    let run = |sym, len: u64| {
        let s = machine.symbol_name(sym);
        if len <= 3 {
            vec![s; len as usize].join(" ")
        } else {
            format!("{s}^{len}")
        }
    };
    let mut parts = vec![format!("^ω {blank}")];
    let left: Vec<_> = view.runs_left().collect();
    parts.extend(left.iter().rev().map(|&(s, n)| run(s, n)));
    let state = view.state();
    let scanned = machine.symbol_name(view.scanned());
    parts.push(if machine.has_char_symbols() {
        format!("({}{scanned})", state.name(machine))
    } else {
        format!("({} {scanned})", state.name(machine))
    });
    parts.extend(view.runs_right().skip(1).map(|(s, n)| run(s, n)));
    parts.push(format!("{blank}^ω"));
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use collatz_tm::zoo::builtin_machine;

    #[test]
    fn window_brackets_head() {
        let m = builtin_machine("M1").unwrap();
        let c = Configuration::parse_display(&m, "b(A1)b").unwrap();
        assert_eq!(tape_window(&m, &c, None), "|[1]|");
        let c = Configuration::parse_display(&m, "b02(A1)2b").unwrap();
        assert_eq!(tape_window(&m, &c, None), "|02[1]2|");
        assert_eq!(head_offset(&c), 2);
        let c = Configuration::parse_display(&m, "b(Cb)1b").unwrap();
        assert_eq!(tape_window(&m, &c, None), "|[b]1|");
    }

    #[test]
    fn window_clips_around_head() {
        let m = builtin_machine("M1").unwrap();
        let c = Configuration::parse_display(&m, "b0000(A1)2222b").unwrap();
        assert_eq!(tape_window(&m, &c, Some(3)), "|…0[1]2…|");
        let c = Configuration::parse_display(&m, "b(A1)2222b").unwrap();
        assert_eq!(tape_window(&m, &c, Some(3)), "|[1]22…|");
    }

    #[test]
    fn compact_runs() {
        let m = builtin_machine("M2").unwrap();
        let c = Configuration::parse_display(&m, "bxxxxbx(A1)1111b").unwrap();
        assert_eq!(compact(&m, &c), "^ω b x^4 b x (A1) 1^4 b^ω");
    }
}
