//! Command-line driver for the fareylab core: schedule generation, checks,
//! ray simulation, limit analysis and SVG rendering.

pub mod commands;
pub mod config;
pub mod formats;
pub mod render;

pub use commands::{exit_code_for, run, Cli};
