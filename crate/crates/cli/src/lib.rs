//! Spec-file parsing, commands and reports for the `flatkahler` binary.

pub mod commands;
pub mod report;
pub mod spec_file;
