//! Spectral laboratory for the Oseen resolvent problem past a body rotating
//! about e₁: Fourier-multiplier solves in ℝ³, rotating-frame conjugation,
//! time-periodic assembly under a rational resonance condition, and the
//! counterexample family showing what goes wrong without it.

pub mod cli;
pub mod counterexample;
pub mod error;
pub mod estimates;
pub mod numerics;
pub mod params;
pub mod resonance;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use params::Params;
