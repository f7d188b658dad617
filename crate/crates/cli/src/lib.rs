//! Suite configuration, runners and report emission for the verification
//! engine.

pub mod config;
pub mod report;
pub mod suites;
