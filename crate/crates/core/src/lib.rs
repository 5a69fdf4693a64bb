//! Behavioral simulator and error-analysis toolkit for the DS-CIM digital
//! stochastic compute-in-memory macro.
//!
//! The macro multiplies signed INT8 activations and weights with unipolar
//! stochastic bitstreams, ORs groups of product bits and accumulates the
//! result cycle by cycle. Sample-region remapping makes each OR group
//! mutually exclusive, so the OR behaves as an exact adder.

pub mod accumulator;
pub mod analysis;
pub mod error;
pub mod macro_sim;
pub mod oracles;
pub mod perf;
pub mod rng;
pub mod sng;

pub use error::{Error, Result};
