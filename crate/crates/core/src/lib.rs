//! Resonance energy transfer between a donor and an acceptor coupled to
//! independent super-Ohmic harmonic baths.
//!
//! The crate covers the whole chain from the bath spectral density to
//! distance-dependent effective transfer rates:
//!
//! * [`model`]: constants, dimer and bath parameters, dipole geometry.
//! * [`bath`]: correlation functions, lineshape functions, spectra and the
//!   polaron dressing factor.
//! * [`golden_rule`]: closed-form golden-rule rates, Förster radii, radiative
//!   lifetimes and efficiencies.
//! * [`dynamics`]: nonequilibrium FRET and coherent (polaron master equation)
//!   population dynamics.
//! * [`kinetics`]: analytic bi-exponential kinetics and the effective rate.
//! * [`sweep`]: presets, distance sweeps, lifetime deduction and CSV output.
//!
//! Units: energies in cm⁻¹, time in fs, dipoles in Debye, distances as
//! `R/R₀` unless stated otherwise.

pub mod bath;
pub mod dynamics;
pub mod error;
pub mod golden_rule;
pub mod kinetics;
pub mod linalg;
pub mod model;
pub mod ode;
pub mod quadrature;
pub mod sweep;

pub use error::{Error, Result};
