//! Numerical verification toolkit for translating solitons of mean curvature
//! flow in R^3.
//!
//! The crate integrates the rotationally symmetric translator ODE in all
//! three forms (graph, inverted graph, arclength), evaluates the full
//! translator PDE residuals on cylindrical and vertical graphs, decomposes
//! fields into axisymmetric part plus remainder, runs the quantitative
//! symmetry and cylindricality checkers with axis fitting and decay
//! schedules, and computes Gaussian densities and entropy estimates.
//!
//! Everything is pure and deterministic: operations are functions of
//! immutable inputs, and parallel paths use fixed reduction orders.

pub mod banding;
pub mod density;
pub mod error;
pub mod field;
pub mod geometry;
pub mod ode;
pub mod residual;
pub mod symmetry;

pub use error::{Error, Result};
