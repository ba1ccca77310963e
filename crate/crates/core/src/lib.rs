//! Numerical laboratory for the cohomology of parabolic Z^2 actions on
//! truncated representation models of SL(2,R) x SL(2,R).

pub mod distributions;
pub mod error;
pub mod cocycle;
pub mod linalg;
pub mod random;
pub mod rep;
pub mod tensor;
pub mod vector_field;

pub use error::{LabError, Result};
