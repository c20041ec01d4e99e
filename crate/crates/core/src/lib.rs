//! Turing machines that simulate the 3x+1 map, and tools to check them.

pub mod accel;
pub mod encoding;
pub mod engine;
pub mod format;
pub mod machine;
pub mod oracle;
pub mod tape;
pub mod verify;
pub mod view;
pub mod zoo;

pub use accel::{run_accelerated, run_accelerated_with_observer, run_rle, RleConfig};
pub use encoding::{CheckpointTemplate, ComparisonMode, Representation, TemplateId};
pub use engine::{run, run_with_observer, step, RunResult, RunStatus, StepOutcome};
pub use format::{format_machine, parse_machine, ParseError};
pub use machine::{Direction, MachineSpec};
pub use tape::{Configuration, ControlState, Tape};
pub use view::ConfigView;
pub use zoo::{builtin, builtin_machine, ZooEntry};
pub use verify::{verify, verify_range, Outcome, RangeSummary, Verdict, VerificationReport};
