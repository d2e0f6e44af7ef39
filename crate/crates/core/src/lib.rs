//! Simulation and closed-form analysis of one-dimensional random walks in
//! sparse random environments.

pub mod analysis;
pub mod env;
pub mod error;
pub mod numerics;
pub mod seed;
pub mod sinai;
pub mod stats;
pub mod walk;

pub use env::{dualize, sample_dual, sample_environment, Dist, DualMode, DualSampleWeight, EnvironmentSpec, GapLaw, SparseEnvironment};
pub use error::{Error, Result};
