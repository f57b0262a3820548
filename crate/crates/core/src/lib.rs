//! Geometry and dynamics of the all-to-all Kuramoto gradient flow with
//! identical oscillators.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; file formats and the command line live in the
//! `kuramoto-cli` crate.
//!
//! Angles are radians. Oscillators are indexed from 0 in the API; the
//! quotient chart fixes the *last* oscillator at angle 0.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cells;
pub mod equilibria;
mod error;
pub mod flow;
pub mod imprints;
pub mod linalg;
pub mod model;
pub mod ode;
pub mod quotient;
mod subset;

pub use error::{Error, Result};
pub use subset::Subset;
