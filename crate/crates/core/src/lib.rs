//! Numerical laboratory for the hydrodynamic route to the Schrödinger
//! equation: Madelung fields, osmotic and convective momenta, split-step and
//! Crank–Nicolson propagation, action/Lagrangian balance checks, and Nelson
//! walker ensembles.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod convergence;
pub mod error;
mod fft;
pub mod field;
pub mod grid;
pub mod madelung;
pub mod ops;
pub mod potential;
pub mod propagator;
pub mod states;
pub mod subquantum;
pub mod units;
pub mod variational;

pub use error::{Error, Result};
pub use field::{ComplexField, Field, FieldScalar, RealField, VectorField};
pub use grid::{build_grid, Grid, GridSpec};
pub use madelung::{NodePolicy, Wavefunction};
pub use ops::Backend;
pub use potential::{make_potential, Potential, PotentialSpec};
pub use propagator::{evolve, EvolveConfig, Method, Observables, Trajectory};
pub use states::InitialState;
pub use units::PhysicalConstants;

pub use num_complex::Complex64;
