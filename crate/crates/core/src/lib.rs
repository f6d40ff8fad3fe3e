//! Solver for the Westervelt equation with nonlocal (time-fractional) damping.
//!
//! The time discretisation is the trapezoidal (Newmark 1/2, 1/4) scheme with
//! the damping convolution approximated by BDF2 convolution quadrature, plain
//! or corrected to be exact on constants. Space is discretised with P1 finite
//! elements on an interval or a structured triangulation of a square.

pub mod convergence;
pub mod cli;
pub mod cq;
pub mod error;
pub mod fem;
pub mod kernels;
pub mod linalg;
pub mod quadrature;
pub mod stepper;

pub use error::{Error, Result};
