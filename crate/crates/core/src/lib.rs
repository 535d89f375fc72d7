//! Qubit-qutrit (2×3) entanglement toolkit.

pub mod cli;
pub mod decompositions;
pub mod error;
pub mod ls;
pub mod measures;
pub mod numerics;
pub mod states;

pub use error::{Error, Result};
