//! Correlator storage and the recursion engine.

mod assemble;
mod engine;
mod store;

pub use assemble::Assembler;
pub use engine::{kernel_factor, run, tr_step, AsymmetryRecord, EngineOptions, RunResult, StepOutput};
pub use store::{canonical, CorrelatorStore, Level, StoreDiff};
