//! Spectral solver for the Dirac Hamiltonian on the zero-gravity Kerr-Newman
//! (zGKN) spacetime.
//!
//! The bound-state problem separates into a radial and an angular system that
//! share the energy `E` and the angular eigenvalue `lambda`. In Prüfer form
//! both systems become angle ODEs on cylinders, and `(E, lambda)` is an
//! eigenpair exactly when both systems possess a saddles connector: an orbit
//! joining the saddle equilibria on the two cylinder boundaries. Bound states
//! are indexed by the two connector winding numbers `(N_Theta, N_Omega)`
//! together with the half-integer angular momentum `kappa`, and map onto the
//! familiar hydrogenic labels `n l_j` in the ring-radius limit `a -> 0`.
//!
//! Everything is expressed in natural units `hbar = c = m = 1`; the ring
//! radius `a` is measured in reduced electron Compton wavelengths and the
//! coupling `gamma = -eQ < 0` plays the role of `-Z alpha`.
//!
//! Module map:
//! - [`ode`] - adaptive embedded Runge-Kutta 5(4) integrator for angle ODEs
//!   with continuous lift tracking and dense output.
//! - [`angular`] - the Theta system: connector shooting and the lambda
//!   eigenvalue solve, plus the exactly solvable `a = 0` operator.
//! - [`radial`] - the Omega system on the full line (and the `a = 0`
//!   half-line), with algebraic-tail start/end corrections.
//! - [`spectrum`] - the coupled two-parameter solver, existence scans and
//!   degeneracy-splitting diagnostics.
//! - [`hydrogen`] - closed-form Dirac-Coulomb oracle: Sommerfeld energies and
//!   the terminating-hypergeometric eigenfunctions.
//! - [`labels`] - winding indices <-> spectroscopic labels.

pub mod angular;
pub mod error;
pub mod hydrogen;
pub mod labels;
pub mod ode;
pub mod radial;
mod solve;
pub mod spectrum;

pub use error::{Error, Result};
pub use labels::SpectroLabel;
pub use ode::{AngleField, LiftedTrajectory, Tolerances, WindingConvention};
pub use spectrum::{BoundState, ModelParams, StateIndex};
