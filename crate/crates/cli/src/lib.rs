//! Command-line front end: catalog verification against the expected
//! verdict table, witness search, and the classification report.

pub mod commands;
pub mod config;
pub mod golden;
pub mod report;
pub mod spec;
