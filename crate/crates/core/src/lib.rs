//! Wave packets and directed polymers under periodically pulsed harmonic
//! potentials.
//!
//! Both problems reduce to one second-order linear recurrence, implemented
//! once in [`recurrence`] and shared by every physical model.

pub mod classical;
pub mod continuum;
pub mod error;
pub mod moebius;
pub mod ode;
pub mod offcenter;
pub mod oracles;
pub mod polymer;
pub mod quantum;
pub mod recurrence;

pub use error::{Error, Result};
