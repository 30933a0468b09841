//! Operational shell: config files, batch runs and output files.

pub mod batch;
pub mod config;
pub mod output;
