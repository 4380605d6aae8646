//! Command-line front end: configuration ingestion, result documents, and
//! the command implementations behind the `qherm` binary.

pub mod commands;
pub mod config;
pub mod document;
