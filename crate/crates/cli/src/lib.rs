//! Library half of the `kgbench` binary: configuration merging and
//! validation, command implementations, and the machine-readable output
//! formats (versioned CSV/JSON schemas plus gnuplot-ready plot data).

pub mod commands;
pub mod config;
pub mod output;
