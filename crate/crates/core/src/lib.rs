//! Two-qubit anisotropic Ising model with a local field along one axis,
//! solved in the Bell basis.
//!
//! The evolution operator splits into two 2x2 sectors, each coupling one pair
//! of Bell states. The crate provides the closed-form spectrum and evolution,
//! numerical oracles to check them, entanglement measures, the algebra of
//! pulse sectors, and constructive control (loops, exchanges, two-pulse
//! synthesis).

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod entanglement;
pub mod error;
pub mod evolution;
pub mod group;
pub mod linalg;
pub mod model;
pub mod output;
pub mod sampling;
pub mod spectral;
pub mod synthesis;
pub mod verify;

pub use error::{Error, Result};
pub use evolution::{evolve_closed, EvolutionOp, Sector};
pub use group::PulseSpec;
pub use model::{Axis, ModelParams, Sign};
