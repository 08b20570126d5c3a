//! Coherent states of the 2D harmonic oscillator read as spinning tops.
//!
//! The crate evaluates the closed-form coherent state and its spin-augmented
//! probability current, and checks each formula against an independent
//! numerical route: split-step spectral evolution, spectral and
//! finite-difference currents, grid quadrature of moments and RK4 tracers.

pub mod analytic;
pub mod currents;
pub mod error;
pub mod evolve;
pub mod flow;
pub mod grid;
pub mod hydrogen;
pub mod params;
pub mod quadrature;
pub mod report;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use grid::{ComplexField, Grid2D, ScalarField, VectorField};
pub use params::{sigma, CoherentStateSpec, PhysParams, SpinSign};
pub use report::{Check, VerificationReport};
