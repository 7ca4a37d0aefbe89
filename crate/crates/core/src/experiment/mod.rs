//! Experiment files, parameter sweeps and result comparison.

pub mod compare;
pub mod run;
pub mod spec;

pub use compare::{compare, CompareError, CompareReport};
pub use run::{run, run_row, RunOutput, SweepRow, HEADER};
pub use spec::{parse_spec, parse_spec_str, Axis, ExperimentSpec, Mode, SpecError, Sweep};
