//! Exact toolkit for the abstract polymer gas.
//!
//! A polymer system is a finite set of polymers with a symmetric, reflexive
//! incompatibility relation; its partition function is the multivariate
//! independence polynomial of the incompatibility graph. This crate computes
//! partition functions, correlations, and Mayer/Ursell coefficients in exact
//! rational arithmetic, evaluates the Fernández-Procacci and Dobrushin
//! convergence radii, and machine-checks the inequalities that make those
//! radii certificates of absolute convergence.

pub mod cli;
pub mod criteria;
pub mod error;
pub mod io;
pub mod mayer;
pub mod model;
pub mod numeric;
pub mod partition;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};
pub use model::{Family, PolymerId, PolymerSubset, PolymerSystem, SubsetGasSpec};
pub use numeric::Rational;
pub use partition::ActivityVector;
pub use criteria::MuVector;
