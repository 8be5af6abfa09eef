//! Experiment runner commands and the HTTP facade used by the live demo.

pub mod commands;
pub mod service;
