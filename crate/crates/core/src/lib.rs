//! Phase-space marginal ("tomographic") distributions of quantum states and
//! their transformation laws under symplectic maps, Galileo boosts and
//! Lorentz boosts.
//!
//! The main objects are the relativistic oscillator states of
//! [`oscillator`], their Wigner functions on the light-cone phase space
//! `(u, v, p_u, p_v)` in [`wigner`], and the two-plane projections of those
//! Wigner functions in [`marginal`]. [`relativity`] checks that a boosted
//! marginal equals a rest-frame marginal with rescaled projection
//! parameters.

pub mod cli;
pub mod error;
pub mod grid;
pub mod marginal;
pub mod oscillator;
pub mod quadrature;
pub mod relativity;
pub mod symplectic;
pub mod wigner;

pub use error::{Error, Result};
