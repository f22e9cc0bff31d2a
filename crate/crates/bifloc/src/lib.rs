//! Bifurcation localization toolkit for four planar predator-prey models:
//! the Bazykin system, a Holling type IV system with harvesting, a
//! Crowley-Martin flow, and its forward-Euler discretization.
//!
//! The crate computes prey-nullcline geometry, coexistence equilibria and
//! their spectra, Hopf / Bogdanov-Takens / Neimark-Sacker loci, and runs
//! randomized sweeps that test where on the nullcline those bifurcations
//! can sit.

pub mod config;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod loci;
pub mod model;
pub mod nullcline;
pub mod report;
pub mod roots;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};
