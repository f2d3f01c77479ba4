//! Library half of the `superatom-qpt` binary: experiment configs, the
//! preset catalog, and the runner that turns a config into result files.

pub mod config;
pub mod presets;
pub mod runner;
