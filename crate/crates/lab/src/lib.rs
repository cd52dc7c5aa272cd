//! File formats, experiment configs and report tables around `contagion-core`.

pub mod commands;
pub mod config;
pub mod edge_list;
mod error;
pub mod report;

pub use error::LabError;
