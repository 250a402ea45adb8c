//! Parameter sweeps: JSON configuration, built-in presets, a parallel driver
//! and CSV/JSON output.

pub mod config;
pub mod engine;
pub mod output;
pub mod presets;

pub use config::{Axis, CutoffSpec, FamilyKind, IndexRange, LabelSpec, Model, Output, RowLabel, Scale, Solver, SweepConfig, Variable};
pub use engine::{expected_rows, resolve_cutoffs, run_sweep, SweepResult, SweepRow};
pub use output::{csv_bytes, write_outputs, Manifest, CSV_HEADER};
pub use presets::{preset, presets, Preset};
