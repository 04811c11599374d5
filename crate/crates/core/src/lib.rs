//! Two-component descriptions of 1D relativistic wave-packet dynamics.
//!
//! The full Dirac spinor (upper and lower component) is propagated exactly
//! or by split-operator stepping, and compared against reductions that evolve
//! the upper component alone: the leading-order time-convolutionless (TCL)
//! equation with its lower-spinor reconstruction, the small-mass phase
//! equation, and the Pauli baseline. Units have ħ = 1 throughout.

pub mod diagnostics;
pub mod dirac;
pub mod error;
pub mod field;
pub mod grid;
pub mod pauli;
pub mod physics;
pub mod smallmass;
pub mod tcl;

pub use diagnostics::{compare_densities, total_leakage, DensityComparison, DensityRecord};
pub use error::{Error, Result};
pub use field::{gaussian_packet, SpinorField, UpperField};
pub use grid::{make_grid, GridSpec};
pub use physics::{PhysicsParams, PotentialSpec};

pub use num_complex::Complex64;
