//! Cat Swarm Optimization (CSO) with its inertia-weighted and parallel
//! variants, the classical F1..F23 benchmark suite, a reproducible experiment
//! harness and the rank/Friedman/Wilcoxon statistics used to compare
//! optimizers.

pub mod compare;
pub mod cso;
pub mod error;
pub mod harness;
pub mod objective;
pub mod stats;
pub mod suite;
pub mod variants;

pub use error::{Error, Result};
pub use objective::{Bounds, Objective};
