//! Command-line front end: configuration, the experiment pipeline, output
//! files and subcommand dispatch.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
