//! Weyl-Heisenberg orbits in `C^N`, SIC frame potentials, and their
//! Fubini-Study averages.
//!
//! The crate is organized bottom-up:
//!
//! - [`numcore`]: dense complex vectors/matrices, FS sampling, exact sphere moments;
//! - [`heisenberg`]: clock/shift group, orbits, parity and order-3 Clifford elements;
//! - [`framepot`]: `F_1`, `F_2`, `f`, and `f_H` (direct and quartic forms, gradient);
//! - [`subspace`]: monomial isometries onto Clifford eigenspaces;
//! - [`averages`]: closed forms, the exact monomial oracle, and Monte Carlo;
//! - [`sicsearch`]: multi-restart minimization/maximization of `f_H`;
//! - [`record`]: stable JSON records for all of the above.

pub mod averages;
pub mod cyclotomic;
pub mod error;
pub mod framepot;
pub mod heisenberg;
pub mod numcore;
pub mod record;
pub mod sicsearch;
pub mod subspace;

pub use error::{Error, Result};
pub use numcore::{CMatrix, CVector, Exact, RngStream};
