//! Presets, distance sweeps, lifetime deduction, efficiency curves and the
//! CSV files behind the `retsim` command.

mod config;
mod run;

pub use config::*;
pub use run::*;
