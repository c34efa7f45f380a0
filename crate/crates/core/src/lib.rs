#![no_std]
//! Mean-payoff objectives on weighted pushdown systems and modular
//! strategies for recursive game graphs.

extern crate alloc;

pub mod gain;
pub mod model;
pub mod reachability;
pub mod summary;
pub mod oracle;
pub mod decide;
mod witness;

pub use witness::{WitnessError, WITNESS_EDGE_LIMIT};
pub mod rsm;
pub mod modular;
pub mod games;
pub mod reductions;
