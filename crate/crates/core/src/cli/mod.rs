//! Sweep configuration, batch runners and CSV output behind the binary.

mod spec;
mod spectrum;
mod sweep;
mod table;

pub use spec::{Axes, Axis, FixedParams, GridSpec, MixtureFamily, OutputKind, SweepMode, SweepSpec, DEFAULT_STEPS};
pub use spectrum::{spectrum_dump, SpectrumDump, SpectrumRow};
pub use sweep::{axis_column, mixture_state, run_mixture_family, run_sweep, run_sweep_with};
pub use table::{emit_csv, read_csv, Cell, SweepRow, Table};
