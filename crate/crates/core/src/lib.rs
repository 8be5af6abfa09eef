//! Markov-chain and Monte Carlo models of single-switch scanning text entry
//! under click-timing and switch noise.

pub mod capacity;
pub mod chain;
pub mod error;
pub mod experiment;
pub mod layout;
pub mod montecarlo;
pub mod noise;
pub mod pmf;
pub mod quadrature;
pub mod session;

pub use chain::{
    build_fast, build_slow, build_slow_with, intended_cell, sequence_probability, ChainOptions,
    Phase, ScanChain, StateId, Terminal, TriggerModel,
};
pub use error::{Error, Result};
pub use layout::{delay_schedule, min_scans, DelaySchedule, FastParams, GridLayout, ScanMode};
pub use experiment::{run_sweep, split_phrase, validate, ExperimentSpec, ParamSet};
pub use noise::{Aim, CellWindow, ClickTiming, NoiseParams, SwitchNoise};
pub use pmf::{analyze, Metric, OutcomeSplit, Pmf, WordAnalysis};
