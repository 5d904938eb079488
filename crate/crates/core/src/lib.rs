//! Numerical laboratory for Dirichlet series on the right half-plane.
//!
//! The crate evaluates finite Dirichlet series and their twists by characters, computes vertical
//! and torus means, checks the Hardy-Stein and Littlewood-Paley identities, counts `xi`-points by
//! the argument principle, and runs Kronecker-flow experiments on the two-torus.

#[cfg(feature = "cli")]
pub mod cli;
pub mod corpus;
pub mod error;
pub mod green;
pub mod io;
pub mod mean;
pub mod poly;
pub mod quad;
pub mod report;
pub mod series;
pub mod torus;
pub mod zeros;

pub use error::{LabError, Result};
pub use num_complex::Complex64;
