//! Point-charge electrodynamics in the Lorenz and Coulomb gauges.
//!
//! The crate evaluates Liénard-Wiechert potentials for charges on prescribed
//! orbits along the x-axis, converts them to the Coulomb gauge through the
//! non-local retarded-to-present time integral, and measures how far the
//! simplified transverse projection `V - (n·V) n` is from the proper
//! divergence-free projection. Far-zone behaviour is probed along null rays
//! (fixed retarded time, growing radius) and summarised by power-law fits.
//!
//! Data-parallel loops (radius sweeps, quadrature panels, grid convolution)
//! run on rayon when the `parallel` feature is enabled and fall back to plain
//! iterators otherwise. Both paths accumulate in a fixed order, so results
//! are bit-identical between them.

pub mod acceptance;
pub mod asymptotics;
pub mod closed_forms;
pub mod config;
pub mod coulomb;
mod error;
pub mod exec;
pub mod grid;
pub mod lw;
pub mod quadrature;
pub mod retarded;
pub mod tail;
pub mod trajectory;
mod vec3;

pub use error::{Error, Result};
pub use exec::Exec;
pub use vec3::Vec3;
