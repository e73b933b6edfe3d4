//! Quantum speed limits for open-system dynamics.
//!
//! Matrix utilities, fidelities, an exactly solvable damped two-level model,
//! a spin coupled to a random two-band dot, and the speed-limit bounds that
//! consume their trajectories.

pub mod dot;
mod error;
pub mod fidelity;
pub mod inequality;
pub mod jc;
pub mod matrix;
pub mod qsl;
pub mod trajectory;

pub use error::{QslError, Result};
