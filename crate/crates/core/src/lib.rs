//! Topological recursion on the equivariant P^1 mirror curve and its
//! comparison with Givental graph sums.

pub mod algebra;
pub mod applications;
pub mod bessel;
pub mod cli;
pub mod curve;
pub mod forms;
pub mod givental;
pub mod graphsum;
pub mod intersections;
pub mod recursion;
pub mod rmatrix;
pub mod error;

pub use error::{Error, Result};
