//! Configuration, grid runner and file formats for the `diffcpf` command.

pub mod config;
pub mod data;
pub mod error;
pub mod predictive;
pub mod presets;
pub mod runner;
