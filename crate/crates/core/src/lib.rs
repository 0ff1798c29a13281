//! Root estimation of quantum states.
//!
//! A state vector is expanded in an orthonormal basis, `psi(x) = sum_i c_i phi_i(x)`,
//! and the coefficients are found by maximum likelihood from samples drawn in
//! mutually complementing measurement spaces (coordinate and momentum, a register
//! and its Fourier image, or spin projections along many directions).
//!
//! The crate is organised by task:
//!
//! * [`basis`] builds the harmonic-oscillator and histogram bases, evaluates states
//!   on grids and provides the discrete Fourier helpers.
//! * [`sampler`] draws seeded synthetic data from a known state.
//! * [`mle`] holds the likelihood-equation solvers, gauge fixing, Fisher and
//!   covariance matrices, chi-square criteria and phase retrieval.
//! * [`energy`] adds the mean-energy constraint.
//! * [`spin`] reconstructs spin states from projection counts.
//! * [`mixture`] divides inhomogeneous samples into pure components.
//! * [`dynamics`] checks the Heisenberg matrix relation for a basis.
//! * [`io`] and [`experiment`] cover file formats and replicate sweeps.

pub mod basis;
pub mod dynamics;
pub mod energy;
mod error;
pub mod exec;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod mixture;
pub mod mle;
pub mod potential;
pub mod sampler;
pub mod spin;
pub mod stats;

pub use error::{Error, Result};
pub use linalg::C64;
