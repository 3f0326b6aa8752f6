//! Exact termination analysis for linear loops `while B x >= c do x := A x + a`
//! over the integers.

pub mod algebra;
pub mod decision;
pub mod error;
pub mod loop_ir;
pub mod relations;
pub mod simulator;
pub mod spectral;
pub mod witness;

pub use error::{Error, Result};
pub use loop_ir::LoopProgram;
