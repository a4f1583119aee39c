//! Simulation toolkit for reading fluid statistics out of quantum circuits.
//!
//! The pipeline: a classical velocity field is amplitude-encoded into a
//! real-amplitude circuit (trained or injected), structured observables on
//! single/twin/ancilla registers estimate the field sums (mean, cubes,
//! collision probability, shifted products), and the statistics layer
//! assembles central moments and structure functions with propagated
//! uncertainties. A stochastically forced Burgers solver produces test
//! fields; expressivity analysis ranks the ansätze.

pub mod burgers;
pub mod circuits;
pub mod encoding;
pub mod error;
pub mod estimators;
pub mod expressivity;
pub mod simulator;
pub mod statistics;

pub use error::{Error, Result};
