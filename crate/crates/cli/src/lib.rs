//! Shared plumbing behind the `nbdiff` binary: sample-file parsing, the flat
//! key/value grid-config format, the results CSV schema, and report
//! rendering. Split out as a library so integration tests drive the same code
//! paths the binary does.

pub mod config;
pub mod csvio;
pub mod input;
pub mod report;
