use std::ops::ControlFlow;

use collatz_tm::accel::{run_accelerated, run_accelerated_with_observer};
use collatz_tm::encoding::{decode, encode, CheckpointTemplate, Representation};
use collatz_tm::engine::{initial_configuration, initial_configuration_str, run, run_with_observer};
use collatz_tm::format::{format_machine, parse_machine};
use collatz_tm::machine::{Direction, MachineSpec, Rule};
use collatz_tm::oracle::{t_step, CollatzLikeSpec};
use collatz_tm::tape::{Configuration, ControlState, Tape};
use collatz_tm::view::ConfigView;
use collatz_tm::zoo::{builtin, names};
use proptest::prelude::*;

/// A random machine with `states` states, `symbols` symbols (0 is blank) and
/// halting state `H`; `None` cells are undefined.
fn machine_from(states: usize, symbols: usize, cells: &[Option<(usize, bool, usize)>]) -> MachineSpec {
    let state_names: Vec<String> = (0..states).map(|i| format!("S{i}")).collect();
    let symbol_names: Vec<String> = (0..symbols).map(|i| format!("s{i}")).collect();
    let mut rules = Vec::new();
    for (i, cell) in cells.iter().enumerate().take(states * symbols) {
        let Some((write, right, next)) = *cell else { continue };
        let target = if next >= states {
            "H".to_owned()
        } else {
            state_names[next].clone()
        };
        rules.push(Rule::new(
            &state_names[i / symbols],
            &symbol_names[i % symbols],
            &symbol_names[write % symbols],
            if right { Direction::Right } else { Direction::Left },
            &target,
        ));
    }
    MachineSpec::new("R", state_names, symbol_names, "s0", "S0", vec!["H".into()], &rules).unwrap()
}

prop_compose! {
    fn arb_machine()(states in 1usize..5, symbols in 2usize..5)
        (cells in proptest::collection::vec(
            proptest::option::weighted(0.9, (0usize..5, any::<bool>(), 0usize..states + 1)),
            states * symbols,
        ), states in Just(states), symbols in Just(symbols)) -> MachineSpec {
        machine_from(states, symbols, &cells)
    }
}

prop_compose! {
    fn arb_case()(m in arb_machine())
        (word in proptest::collection::vec(0u8..m.num_symbols() as u8, 1..12), m in Just(m))
        -> (MachineSpec, Vec<u8>) {
        (m, word)
    }
}

fn same_run(m: &MachineSpec, init: &Configuration, budget: u64) -> Result<(), TestCaseError> {
    let plain = run(m, init, budget).unwrap();
    let fast = run_accelerated(m, init, budget).unwrap();
    prop_assert_eq!(plain.status, fast.status);
    prop_assert_eq!(plain.steps, fast.steps);
    prop_assert!(plain.config.exactly_eq(&fast.config));
    Ok(())
}

proptest! {
    #[test]
    fn runs_are_deterministic((m, word) in arb_case(), budget in 0u64..300) {
        let init = initial_configuration(&m, &word).unwrap();
        let a = run(&m, &init, budget).unwrap();
        let b = run(&m, &init, budget).unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert!(a.config.exactly_eq(&b.config));
    }

    #[test]
    fn runs_commute_with_translation((m, word) in arb_case(), budget in 0u64..300, offset in -50i64..50) {
        let init = initial_configuration(&m, &word).unwrap();
        let direct = run(&m, &init, budget).unwrap();
        let shifted = run(&m, &init.translated(offset), budget).unwrap();
        prop_assert_eq!(direct.status, shifted.status);
        prop_assert!(direct.config.translated(offset).exactly_eq(&shifted.config));
    }

    #[test]
    fn surrounding_blanks_change_nothing((m, word) in arb_case(), budget in 0u64..300, pad in 1usize..20) {
        let init = initial_configuration(&m, &word).unwrap();
        let mut padded_word = vec![0u8; pad];
        padded_word.extend_from_slice(&word);
        padded_word.extend(std::iter::repeat_n(0u8, pad));
        let tape = Tape::from_word_at(&padded_word, -(pad as i64), 0);
        let padded = Configuration::new(tape, 0, ControlState::Running(m.start()));
        prop_assert!(init.exactly_eq(&padded));
        let a = run(&m, &init, budget).unwrap();
        let b = run(&m, &padded, budget).unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert!(a.config.exactly_eq(&b.config));
    }

    #[test]
    fn accelerated_matches_plain_on_random_machines((m, word) in arb_case(), budget in 0u64..2000) {
        let init = initial_configuration(&m, &word).unwrap();
        same_run(&m, &init, budget)?;
    }

    #[test]
    fn accelerated_matches_plain_on_zoo(idx in 0usize..8, x in 1u64..300, budget in 0u64..200_000) {
        let name = names().nth(idx).unwrap();
        let entry = builtin(name).unwrap();
        let word = encode(x, entry.encoding).unwrap();
        let init = initial_configuration_str(&entry.machine, &word).unwrap();
        same_run(&entry.machine, &init, budget)?;
    }

    #[test]
    fn observer_sees_every_configuration((m, word) in arb_case(), budget in 0u64..300) {
        let init = initial_configuration(&m, &word).unwrap();
        let mut calls = 0u64;
        let r = run_with_observer(&m, &init, budget, |_| {
            calls += 1;
            ControlFlow::Continue(())
        }).unwrap();
        prop_assert_eq!(calls, r.steps + 1);
    }

    #[test]
    fn format_round_trips(
        states in 1usize..5,
        symbols in 2usize..5,
        cells in proptest::collection::vec(
            proptest::option::of((0usize..5, any::<bool>(), 0usize..6)),
            20,
        ),
        fill in proptest::collection::vec((0usize..5, any::<bool>(), 0usize..6), 20),
    ) {
        // the format declares symbols by reading and states by their rules:
        // keep the start row total and give every state a rule
        let cells: Vec<_> = (0..states * symbols)
            .map(|i| {
                let forced = i < symbols || i % symbols == 0;
                let (w, r, n) = cells[i].unwrap_or(fill[i]);
                (forced || cells[i].is_some()).then_some((w, r, n % (states + 1)))
            })
            .collect();
        let m = machine_from(states, symbols, &cells);
        let text = format_machine(&m);
        prop_assert_eq!(parse_machine(&text).unwrap(), m);
    }

    #[test]
    fn encode_decode_round_trip(v in 1u64..u64::MAX / 4) {
        for repr in [Representation::Base3, Representation::BinaryPair] {
            prop_assert_eq!(decode(&encode(v, repr).unwrap(), repr), Ok(v));
        }
    }

    #[test]
    fn leading_zeros_are_absorbed(v in 1u64..1_000_000, zeros in 0usize..6) {
        let base3 = format!("{}{}", "0".repeat(zeros), encode(v, Representation::Base3).unwrap());
        prop_assert_eq!(decode(&base3, Representation::Base3), Ok(v));
        let pairs = format!("{}{}", encode(v, Representation::BinaryPair).unwrap(), "10".repeat(zeros));
        prop_assert_eq!(decode(&pairs, Representation::BinaryPair), Ok(v));
    }

    #[test]
    fn oracle_identities(n in 1u64..u64::MAX / 8) {
        prop_assert_eq!(t_step(2 * n), Ok(n));
        prop_assert_eq!(t_step(2 * n + 1), Ok(3 * n + 2));
    }

    #[test]
    fn collatz_like_form_agrees(x in 1i64..i64::MAX / 4) {
        let spec = CollatzLikeSpec::three_x_plus_one();
        prop_assert_eq!(spec.step(x).unwrap() as u64, t_step(x as u64).unwrap());
    }
}

#[test]
fn unary_round_trip() {
    for v in 1..=300 {
        assert_eq!(decode(&encode(v, Representation::Unary).unwrap(), Representation::Unary), Ok(v));
    }
}

// past the first return to 1, M2 and M4 shed residue on every lap and
// checkpoint extraction turns quadratic
fn until_loop(seen: Option<(u64, u64)>) -> ControlFlow<()> {
    match seen {
        Some((steps, 1)) if steps > 0 => ControlFlow::Break(()),
        _ => ControlFlow::Continue(()),
    }
}

/// The accelerated observer skips configurations inside repeated-transition
/// runs; checkpoint sequences must not change because of it.
#[test]
fn accelerated_observer_sees_the_same_checkpoints() {
    for name in names() {
        let entry = builtin(name).unwrap();
        let m = &entry.machine;
        let template = CheckpointTemplate::new(entry.template, m).unwrap();
        for x in 1..=40 {
            let word = encode(x, entry.encoding).unwrap();
            let init = initial_configuration_str(m, &word).unwrap();
            let budget = 300_000;
            let mut plain = Vec::new();
            run_with_observer(m, &init, budget, |c| {
                let seen = template.checkpoint(c).map(|v| (c.steps, v));
                plain.extend(seen);
                until_loop(seen)
            })
            .unwrap();
            let mut fast = Vec::new();
            run_accelerated_with_observer(m, &init, budget, |c| {
                let seen = template.checkpoint(c).map(|v| (c.steps(), v));
                fast.extend(seen);
                until_loop(seen)
            })
            .unwrap();
            assert_eq!(plain, fast, "{name} {x}");
        }
    }
}
