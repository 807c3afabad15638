//! Scattering, resonances and surface-plasmon asymptotics for two-dimensional
//! cavities with negative permittivity.
//!
//! The crate is organised as a stack:
//!
//! * [`specfun`]: complex Bessel kernel (J, I, H⁽¹⁾ with K/Y used internally).
//! * [`rootfind`]: argument-principle zero finder on rectangles.
//! * [`diskmodel`]: exact Fourier–Bessel solution for the circular cavity.
//! * [`geometry`]: closed curves on an arclength grid and permittivity traces.
//! * [`wkb`]: the boundary-layer asymptotic hierarchy and plasmonic intervals.
//! * [`cli`]: configuration, command drivers and output writers.

pub mod cli;
pub mod diskmodel;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod quadrature;
pub mod rootfind;
pub mod specfun;
pub mod wkb;

pub use error::{Error, Result};

/// Version string embedded in every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
