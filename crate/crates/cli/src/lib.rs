//! Scenario handling, execution and output for the `geoflow` command.

pub mod commands;
pub mod runner;
pub mod scenario;
pub mod soliton;
