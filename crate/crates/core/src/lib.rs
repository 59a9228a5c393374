//! Point-vortex dynamics on the plane with a satellite ring around a central
//! vortex: symmetry reduction by the Euclidean group, reduced dynamics,
//! relative equilibria, slice coordinates and Poincaré sections.

pub mod calculus;
pub mod equilibria;
pub mod error;
pub mod integrate;
pub mod poincare;
pub mod reduced_dynamics;
pub mod resolution;
pub mod se2;
pub mod slice;
pub mod vortex_core;

pub use error::{Error, Result};
