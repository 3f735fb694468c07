//! Simulation toolkit for optically gated, ferroelectrically defined
//! quantum-dot spin qubits: rectified-polarization estimates, 1-D
//! single-electron dynamics, two-electron exchange, exchange-gate spin
//! registers and the pulse-schedule format that ties them together.
//!
//! All quantities are SI unless a name says otherwise.

pub mod error;
pub mod exchange;
pub mod optics;
pub mod physcore;
pub mod pulseprog;
pub mod qdyn1d;
pub mod spinreg;

pub use error::{Error, Result};
