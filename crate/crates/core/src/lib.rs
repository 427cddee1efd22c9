//! Time-optimal steering of pure quantum states through a fixed background
//! Hamiltonian.
//!
//! A wind `H₀` acts on the system at all times; the controller adds `H₁(t)`
//! subject to `2 tr(H₁²) = 1`. [`solver`] finds the minimal transfer time and
//! the optimal control, [`propagator`] integrates arbitrary controls
//! independently, and [`oracle`] compares the optimum against sampled
//! competitors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod cli;
pub mod geometry;
pub mod horizontality;
pub mod instances;
pub mod linalg;
pub mod oracle;
pub mod problem;
pub mod propagator;
pub mod sampling;
pub mod solver;
