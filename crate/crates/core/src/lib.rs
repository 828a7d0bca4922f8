//! Nonadiabatic geometric quantum gates with dynamical-phase correction.
//!
//! Pulse schedules for single-loop, composite and dynamically corrected
//! gates, closed- and open-system evolution, decoherence-free-subspace
//! encodings, and sweep/fit utilities.

pub mod dfs;
pub mod engine;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod schedule;

pub use engine::{EngineConfig, ErrorModel, EvolutionResult};
pub use error::{Error, Result};
pub use linalg::Operator;
pub use schedule::{build, GateParams, Schedule, Scheme};
