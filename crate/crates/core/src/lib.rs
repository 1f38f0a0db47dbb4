//! Optimal time-bounded reachability for continuous-time Markov decision
//! processes and two-player continuous-time Markov games.
//!
//! [`solver::solve`] integrates the optimality equations backwards from the
//! time bound and returns the value function together with a cylindrical
//! scheduler: finitely many time intervals, each with one positional choice.
//! [`verify`] holds independent oracles used to cross-check it.

pub mod error;
pub mod fixtures;
pub mod format;
pub mod model;
pub mod random;
pub mod solver;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
