//! Command-line harness for the flexible flow shop island GA.

pub mod cli;
pub mod commands;
pub mod error;
pub mod files;
pub mod stats;

pub use error::{BenchError, Result};
