//! Output-feedback control with joint state and disturbance estimation.
//!
//! The crate builds nominal and extended linear models, runs extended state
//! observers and filter-based estimators, evaluates least-squares control,
//! checks Lyapunov-based stability certificates and simulates closed loops.

pub mod config;
pub mod control;
pub mod error;
pub mod estimation;
pub mod matrix;
pub mod model;
pub mod numkernel;
pub mod sim;
pub mod stability;

pub use error::{Error, Result};
pub use matrix::RealMatrix;
