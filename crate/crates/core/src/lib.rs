//! Interface rigidity in the strong-coupling Falicov-Kimball model, at desk
//! scale.
//!
//! * [`lattice`]: sites, volumes, boundary conditions, spin configurations,
//!   bond clusters.
//! * [`quantum`]: exact electron traces, effective ionic energies and
//!   multi-site couplings.
//! * [`model`]: the classical second/fourth-order Hamiltonians, potentials,
//!   Ising contours.
//! * [`interface`]: projection of 111 interfaces onto the triangular
//!   lattice, rhombus tilings and height functions.
//! * [`rcontour`]: bases, R-contours, their energies and the removal
//!   transformation.
//! * [`sampler`]: Metropolis sampling and interface observables.
//! * [`bounds`]: the explicit constant chains of the convergence proofs.
//! * [`svg`]: plain SVG drawings of tilings, contours and spin slices.
//! * [`cli`]: the `fkr` command-line driver.

pub mod bounds;
pub mod error;
pub mod interface;
pub mod lattice;
pub mod model;
pub mod quantum;
pub mod rcontour;
pub mod cli;
pub mod sampler;
pub mod svg;

pub use error::{Error, Result};
