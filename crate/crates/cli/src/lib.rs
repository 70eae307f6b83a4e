//! Command-line front end: experiment records, replay and sweeps.

pub mod cli;
pub mod exec;
pub mod record;
pub mod sweep;
