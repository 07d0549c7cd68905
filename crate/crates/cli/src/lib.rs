//! Command-line driver: subcommands, report formats and the verification
//! suites.

pub mod commands;
pub mod output;
pub mod suites;
