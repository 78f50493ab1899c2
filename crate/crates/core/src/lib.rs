//! Tunneling amplitudes of asymmetric double-well potentials.
//!
//! The amplitude of an asymmetric well is assembled from the instanton
//! amplitudes of the two symmetric wells obtained by reflecting each half
//! about the barrier top. A finite-difference solver provides the reference
//! splitting and a two-level model covers the resulting dynamics.

pub mod diagnostics;
pub mod error;
pub mod exact;
pub mod exprparser;
pub mod numerics;
pub mod potential;
pub mod semiclassical;
pub mod twolevel;

pub use diagnostics::Warning;
pub use error::{Error, Result};
pub use potential::{characterize, characterize_with, Potential, Side, Strictness, WellGeometry};
pub use semiclassical::{herring_amplitude, tunneling_amplitude, TunnelingResult};
