//! Lohe tensor aggregation models.
//!
//! A characteristic symbol `(d, K, {A_j}, {T_j^0})` fixes one Cauchy problem
//! for N oscillators whose states are unit-norm complex tensors of size `d`.
//! Symbols fuse into larger symbols, and the fused flow decomposes into a
//! weakly coupled system of the component flows.

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod models;
pub mod symbol;
pub mod tensor;

pub use error::{Error, Result};
