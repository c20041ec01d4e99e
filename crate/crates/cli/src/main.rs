mod render;

use std::io::{self, BufWriter, Write};
use std::ops::ControlFlow;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use collatz_tm::accel::{run_accelerated, run_rle};
use collatz_tm::encoding::{decode, encode, theorem1_target, CheckpointTemplate, Representation};
use collatz_tm::engine::{initial_configuration_str, run, run_with_observer, RunStatus};
use collatz_tm::format::{format_machine, parse_machine};
use collatz_tm::machine::MachineSpec;
use collatz_tm::tape::Configuration;
use collatz_tm::verify::{self, Verdict, DEFAULT_MAX_STEPS};
use collatz_tm::zoo::{self, HaltingKind, Theorem, ZooEntry, ZooError};

#[derive(Parser)]
#[command(name = "collatz-tm", version, about = "Run and check Turing machines that iterate the 3x+1 map")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    /// One JSON object per line.
    Structured,
}

#[derive(Args)]
struct MachineArg {
    /// Built-in machine (M1..M8) or path to a machine file
    #[arg(short, long)]
    machine: String,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputArg {
    /// Positive integer, encoded in the machine's representation
    #[arg(short = 'n', long, value_parser = clap::value_parser!(u64).range(1..))]
    input: Option<u64>,
    /// Tape word given symbol by symbol, head on the first symbol
    #[arg(long)]
    raw_word: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in machines
    List {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print a machine's definition
    Show {
        #[command(flatten)]
        machine: MachineArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a machine and print the final configuration
    Run {
        #[command(flatten)]
        machine: MachineArg,
        #[command(flatten)]
        input: InputArg,
        /// Representation for integer input (defaults to the machine's own)
        #[arg(long)]
        repr: Option<Representation>,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: u64,
        /// Step one transition at a time instead of skipping repeated runs
        #[arg(long)]
        naive: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print every configuration of a run, with checkpoints
    Trace {
        #[command(flatten)]
        machine: MachineArg,
        #[command(flatten)]
        input: InputArg,
        /// Representation for integer input (defaults to the machine's own)
        #[arg(long)]
        repr: Option<Representation>,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: u64,
        /// Clip the tape to this many cells around the head
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check one input of a built-in machine against the oracle
    Verify {
        #[command(flatten)]
        machine: MachineArg,
        #[arg(short = 'n', long, value_parser = clap::value_parser!(u64).range(1..))]
        input: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check every input in LO..=HI
    VerifyRange {
        machine: String,
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        lo: u64,
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        hi: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: u64,
        /// Worker threads; 0 uses every CPU
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Encode a positive integer as a tape word
    Encode {
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        value: u64,
        /// base3, unary or binary-pair
        #[arg(long, required_unless_present = "machine")]
        repr: Option<Representation>,
        /// Use this built-in machine's representation
        #[arg(short, long)]
        machine: Option<String>,
    },
    /// Decode a tape word to an integer
    Decode {
        word: String,
        /// base3, unary or binary-pair
        #[arg(long, required_unless_present = "machine")]
        repr: Option<Representation>,
        #[arg(short, long)]
        machine: Option<String>,
    },
    /// Time the plain and accelerated engines on the same run
    Bench {
        #[command(flatten)]
        machine: MachineArg,
        #[command(flatten)]
        input: InputArg,
        /// Representation for integer input (defaults to the machine's own)
        #[arg(long)]
        repr: Option<Representation>,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        repetitions: u32,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Exit {
    Pass = 0,
    Fail = 1,
    Budget = 2,
    Usage = 3,
}

impl From<Verdict> for Exit {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => Exit::Pass,
            Verdict::Fail => Exit::Fail,
            Verdict::WeakPass | Verdict::Inconclusive => Exit::Budget,
        }
    }
}

struct Loaded {
    machine: MachineSpec,
    entry: Option<ZooEntry>,
}

fn load(selector: &str) -> Result<Loaded, CliError> {
    match zoo::builtin(selector) {
        Ok(entry) => Ok(Loaded {
            machine: entry.machine.clone(),
            entry: Some(entry),
        }),
        Err(ZooError::UnknownMachine(_)) => {
            let path = Path::new(selector);
            if !path.is_file() {
                let known: Vec<_> = zoo::names().collect();
                return Err(usage(format!(
                    "`{selector}` is neither a built-in machine ({}) nor a file",
                    known.join(", ")
                )));
            }
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{selector}: {e}")))?;
            let machine = parse_machine(&text).map_err(|e| usage(format!("{selector}: {e}")))?;
            Ok(Loaded { machine, entry: None })
        }
        Err(e) => Err(usage(e)),
    }
}

fn builtin_entry(selector: &str) -> Result<ZooEntry, CliError> {
    zoo::builtin(selector).map_err(usage)
}

fn input_word(loaded: &Loaded, input: &InputArg, repr: Option<Representation>) -> Result<String, CliError> {
    if let Some(w) = &input.raw_word {
        return Ok(w.clone());
    }
    let n = input.input.expect("clap requires one input");
    let repr = repr
        .or(loaded.entry.as_ref().map(|e| e.encoding))
        .ok_or_else(|| usage("--repr is required for integer input on a machine file"))?;
    encode(n, repr).map_err(usage)
}

fn initial(loaded: &Loaded, word: &str) -> Result<Configuration, CliError> {
    initial_configuration_str(&loaded.machine, word).map_err(usage)
}

fn status_text(machine: &MachineSpec, status: RunStatus) -> String {
    match status {
        RunStatus::Halted { halt } => format!("halted({})", machine.halt_name(halt)),
        RunStatus::Stuck { state, symbol } => {
            format!("stuck({},{})", machine.state_name(state), machine.symbol_name(symbol))
        }
        RunStatus::BudgetExhausted => "budget-exhausted".into(),
        RunStatus::ObserverStopped => "stopped".into(),
    }
}

fn status_exit(status: RunStatus) -> Exit {
    match status {
        RunStatus::Halted { .. } | RunStatus::ObserverStopped => Exit::Pass,
        RunStatus::Stuck { .. } => Exit::Fail,
        RunStatus::BudgetExhausted => Exit::Budget,
    }
}

fn class(m: &MachineSpec) -> String {
    format!("{}x{}", m.num_states(), m.num_symbols())
}

fn halting_kind(kind: HaltingKind) -> &'static str {
    match kind {
        HaltingKind::NeverHalting => "never-halting",
        HaltingKind::HaltsOnLoop => "halts-on-loop",
    }
}

fn cmd_list(out: &mut impl Write, format: Format) -> Result<Exit, CliError> {
    for name in zoo::names() {
        let e = builtin_entry(name)?;
        match format {
            Format::Text => writeln!(
                out,
                "{name:<3} {:<5} {:<14} {:<12} {}",
                class(&e.machine),
                halting_kind(e.halting_kind),
                e.encoding.as_str(),
                e.note
            )?,
            Format::Structured => writeln!(
                out,
                "{}",
                json!({
                    "name": name,
                    "states": e.machine.num_states(),
                    "symbols": e.machine.num_symbols(),
                    "halting_kind": halting_kind(e.halting_kind),
                    "encoding": e.encoding.as_str(),
                    "template": e.template.to_string(),
                    "note": e.note,
                })
            )?,
        }
    }
    Ok(Exit::Pass)
}

fn cmd_show(out: &mut impl Write, selector: &str, format: Format) -> Result<Exit, CliError> {
    let loaded = load(selector)?;
    let m = &loaded.machine;
    match format {
        Format::Text => {
            if let Some(e) = &loaded.entry {
                writeln!(
                    out,
                    "# {} {}, {}, {} encoding, checkpoints {}",
                    m.name(),
                    class(m),
                    halting_kind(e.halting_kind),
                    e.encoding,
                    e.template
                )?;
                writeln!(out, "# {}", e.note)?;
            }
            write!(out, "{}", format_machine(m))?;
        }
        Format::Structured => {
            let rules: Vec<_> = m
                .rules()
                .into_iter()
                .map(|r| json!([r.state, r.read, r.write, r.direction.token(), r.next]))
                .collect();
            let mut record = json!({
                "name": m.name(),
                "states": m.states(),
                "symbols": m.symbols(),
                "blank": m.symbol_name(m.blank()),
                "start": m.state_name(m.start()),
                "halt": m.halt_states(),
                "rules": rules,
            });
            if let Some(e) = &loaded.entry {
                record["halting_kind"] = json!(halting_kind(e.halting_kind));
                record["encoding"] = json!(e.encoding.as_str());
                record["template"] = json!(e.template.to_string());
            }
            writeln!(out, "{record}")?;
        }
    }
    Ok(Exit::Pass)
}

struct RunArgs<'a> {
    selector: &'a str,
    input: &'a InputArg,
    repr: Option<Representation>,
    max_steps: u64,
    format: Format,
}

fn cmd_run(out: &mut impl Write, a: RunArgs, naive: bool) -> Result<Exit, CliError> {
    let loaded = load(a.selector)?;
    let m = &loaded.machine;
    let word = input_word(&loaded, a.input, a.repr)?;
    let init = initial(&loaded, &word)?;
    let (status, steps, config) = if naive {
        let r = run(m, &init, a.max_steps).map_err(usage)?;
        (r.status, r.steps, render::compact(m, &r.config))
    } else {
        let r = run_rle(m, &init, a.max_steps, |_| ControlFlow::Continue(())).map_err(usage)?;
        (r.status, r.steps, render::compact(m, &r.config))
    };
    match a.format {
        Format::Text => {
            writeln!(out, "{} {} steps={}", m.name(), status_text(m, status), steps)?;
            writeln!(out, "{config}")?;
        }
        Format::Structured => writeln!(
            out,
            "{}",
            json!({
                "machine": m.name(),
                "word": word,
                "status": status_text(m, status),
                "steps": steps,
                "configuration": config,
            })
        )?,
    }
    Ok(status_exit(status))
}

enum TraceEnd {
    Target(u64),
    Loop,
}

/// Writes `line` unless an earlier write failed, keeping the first error.
fn emit(out: &mut impl Write, error: &mut Option<io::Error>, line: String) {
    if error.is_none() {
        if let Err(e) = writeln!(out, "{line}") {
            *error = Some(e);
        }
    }
}

fn cmd_trace(out: &mut impl Write, a: RunArgs, window: Option<usize>) -> Result<Exit, CliError> {
    let loaded = load(a.selector)?;
    let m = &loaded.machine;
    let word = input_word(&loaded, a.input, a.repr)?;
    let init = initial(&loaded, &word)?;
    let template = match &loaded.entry {
        Some(e) => Some(CheckpointTemplate::new(e.template, m).map_err(usage)?),
        None => None,
    };
    let seeks_target = loaded.entry.as_ref().is_some_and(|e| e.theorem == Some(Theorem::ReachesTarget));
    let seeks_loop = !seeks_target
        && loaded.entry.as_ref().is_some_and(|e| e.halting_kind == HaltingKind::NeverHalting);

    let mut io_error = None;
    let mut end = None;
    // checkpoint lines wait until the machine acts on their configuration,
    // so a run that stops on its budget leaves the last one unannotated
    let mut pending: Option<String> = None;
    let result = run_with_observer(m, &init, a.max_steps, |c| {
        if let Some(p) = pending.take() {
            emit(out, &mut io_error, p);
        }
        let state = c.state.name(m);
        emit(
            out,
            &mut io_error,
            match a.format {
                Format::Text => format!(
                    "{} {} {} {}",
                    c.steps,
                    state,
                    render::head_offset(c),
                    render::tape_window(m, c, window)
                ),
                Format::Structured => json!({
                    "step": c.steps,
                    "state": state,
                    "head": render::head_offset(c),
                    "tape": render::tape_window(m, c, window),
                })
                .to_string(),
            },
        );
        let checkpoint = template.as_ref().and_then(|t| t.checkpoint(c));
        if let Some(v) = checkpoint {
            pending = Some(match a.format {
                Format::Text => format!("CHECKPOINT {v}"),
                Format::Structured => json!({"checkpoint": v, "step": c.steps}).to_string(),
            });
        }
        if c.steps > 0 {
            if seeks_loop && checkpoint == Some(1) {
                end = Some(TraceEnd::Loop);
                return ControlFlow::Break(());
            }
            if seeks_target {
                if let Some(n) = theorem1_target(m, c) {
                    end = Some(TraceEnd::Target(n));
                    return ControlFlow::Break(());
                }
            }
        }
        if io_error.is_some() {
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    })
    .map_err(usage)?;
    if let Some(e) = io_error {
        return Err(e.into());
    }
    if result.status != RunStatus::BudgetExhausted {
        if let Some(p) = pending {
            writeln!(out, "{p}")?;
        }
    }
    let steps = result.steps;
    let (text, record) = match (result.status, end) {
        (RunStatus::ObserverStopped, Some(TraceEnd::Target(n))) => (
            format!("THEOREM1 n={n}"),
            json!({"end": "theorem1", "n": n, "steps": steps}),
        ),
        (RunStatus::ObserverStopped, _) => (
            format!("LOOP steps={steps}"),
            json!({"end": "loop", "steps": steps}),
        ),
        (RunStatus::Halted { halt }, _) => (
            format!("HALT {} steps={steps}", m.halt_name(halt)),
            json!({"end": "halt", "state": m.halt_name(halt), "steps": steps}),
        ),
        (RunStatus::Stuck { state, symbol }, _) => {
            let (s, y) = (m.state_name(state), m.symbol_name(symbol));
            (
                format!("STUCK ({s},{y}) steps={steps}"),
                json!({"end": "stuck", "state": s, "symbol": y, "steps": steps}),
            )
        }
        (RunStatus::BudgetExhausted, _) => {
            eprintln!("budget of {} steps exhausted", a.max_steps);
            return Ok(Exit::Budget);
        }
    };
    match a.format {
        Format::Text => writeln!(out, "{text}")?,
        Format::Structured => writeln!(out, "{record}")?,
    }
    Ok(status_exit(result.status))
}

fn cmd_verify(out: &mut impl Write, selector: &str, input: u64, max_steps: u64, format: Format) -> Result<Exit, CliError> {
    let entry = builtin_entry(selector)?;
    let report = verify::verify(entry.machine.name(), input, max_steps).map_err(usage)?;
    match format {
        Format::Text => writeln!(out, "{}", report.text_line())?,
        Format::Structured => writeln!(out, "{}", report.json_line())?,
    }
    Ok(report.verdict.into())
}

fn cmd_verify_range(
    out: &mut impl Write,
    selector: &str,
    (lo, hi): (u64, u64),
    max_steps: u64,
    jobs: usize,
    format: Format,
) -> Result<Exit, CliError> {
    let entry = builtin_entry(selector)?;
    if lo > hi {
        return Err(usage(format!("empty range {lo}..={hi}")));
    }
    let summary = verify::verify_range(entry.machine.name(), lo, hi, max_steps, jobs).map_err(usage)?;
    for r in &summary.reports {
        match format {
            Format::Text => writeln!(out, "{}", r.text_line())?,
            Format::Structured => writeln!(out, "{}", r.json_line())?,
        }
    }
    match format {
        Format::Text => writeln!(out, "{}", summary.text_line())?,
        Format::Structured => writeln!(out, "{}", summary.json_line())?,
    }
    Ok(summary.worst().into())
}

fn representation_for(repr: Option<Representation>, machine: Option<&str>) -> Result<Representation, CliError> {
    match (repr, machine) {
        (Some(r), _) => Ok(r),
        (None, Some(m)) => Ok(builtin_entry(m)?.encoding),
        (None, None) => Err(usage("give --repr or --machine")),
    }
}

fn timed<T>(reps: u32, mut f: impl FnMut() -> T) -> (T, Duration) {
    let mut best = Duration::MAX;
    let mut last = None;
    for _ in 0..reps {
        let start = Instant::now();
        let r = f();
        best = best.min(start.elapsed());
        last = Some(r);
    }
    (last.expect("at least one repetition"), best)
}

fn per_second(steps: u64, d: Duration) -> f64 {
    steps as f64 / d.as_secs_f64().max(1e-9)
}

fn cmd_bench(out: &mut impl Write, a: RunArgs, repetitions: u32) -> Result<Exit, CliError> {
    let loaded = load(a.selector)?;
    let m = &loaded.machine;
    let word = input_word(&loaded, a.input, a.repr)?;
    let init = initial(&loaded, &word)?;
    let (plain, plain_time) = timed(repetitions, || run(m, &init, a.max_steps));
    let (fast, fast_time) = timed(repetitions, || run_accelerated(m, &init, a.max_steps));
    let (plain, fast) = (plain.map_err(usage)?, fast.map_err(usage)?);
    let same = plain.status == fast.status && plain.steps == fast.steps && plain.config.exactly_eq(&fast.config);
    let status = status_text(m, plain.status);
    match a.format {
        Format::Text => {
            writeln!(out, "{} {} steps={} repetitions={repetitions}", m.name(), status, plain.steps)?;
            writeln!(
                out,
                "naive       best {:>10.3} ms  {:>14.0} steps/s",
                plain_time.as_secs_f64() * 1e3,
                per_second(plain.steps, plain_time)
            )?;
            writeln!(
                out,
                "accelerated best {:>10.3} ms  {:>14.0} steps/s",
                fast_time.as_secs_f64() * 1e3,
                per_second(fast.steps, fast_time)
            )?;
            if same {
                writeln!(out, "results identical")?;
            } else {
                writeln!(
                    out,
                    "MISMATCH naive {} steps={} vs accelerated {} steps={}",
                    status,
                    plain.steps,
                    status_text(m, fast.status),
                    fast.steps
                )?;
            }
        }
        Format::Structured => writeln!(
            out,
            "{}",
            json!({
                "machine": m.name(),
                "word": word,
                "status": status,
                "steps": plain.steps,
                "repetitions": repetitions,
                "identical": same,
                "naive_best_ms": plain_time.as_secs_f64() * 1e3,
                "accelerated_best_ms": fast_time.as_secs_f64() * 1e3,
            })
        )?,
    }
    Ok(if same { Exit::Pass } else { Exit::Fail })
}

fn dispatch(command: Command, out: &mut impl Write) -> Result<Exit, CliError> {
    match command {
        Command::List { format } => cmd_list(out, format),
        Command::Show { machine, format } => cmd_show(out, &machine.machine, format),
        Command::Run { machine, input, repr, max_steps, naive, format } => {
            let a = RunArgs { selector: &machine.machine, input: &input, repr, max_steps, format };
            cmd_run(out, a, naive)
        }
        Command::Trace { machine, input, repr, max_steps, window, format } => {
            let a = RunArgs { selector: &machine.machine, input: &input, repr, max_steps, format };
            cmd_trace(out, a, window)
        }
        Command::Verify { machine, input, max_steps, format } => {
            cmd_verify(out, &machine.machine, input, max_steps, format)
        }
        Command::VerifyRange { machine, lo, hi, max_steps, jobs, format } => {
            cmd_verify_range(out, &machine, (lo, hi), max_steps, jobs, format)
        }
        Command::Encode { value, repr, machine } => {
            let repr = representation_for(repr, machine.as_deref())?;
            writeln!(out, "{}", encode(value, repr).map_err(usage)?)?;
            Ok(Exit::Pass)
        }
        Command::Decode { word, repr, machine } => {
            let repr = representation_for(repr, machine.as_deref())?;
            writeln!(out, "{}", decode(&word, repr).map_err(usage)?)?;
            Ok(Exit::Pass)
        }
        Command::Bench { machine, input, repr, repetitions, max_steps, format } => {
            let a = RunArgs { selector: &machine.machine, input: &input, repr, max_steps, format };
            cmd_bench(out, a, repetitions)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::Usage as u8 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let code = match dispatch(cli.command, &mut out).and_then(|code| out.flush().map(|_| code).map_err(Into::into)) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = out.flush();
            eprintln!("error: {msg}");
            Exit::Usage
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            Exit::Fail
        }
    };
    ExitCode::from(code as u8)
}
