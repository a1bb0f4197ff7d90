//! Stationarity and constraint-qualification analysis for parametric
//! optimization problems.
//!
//! The crate decides, from exact first-order data at a point, whether the
//! point is a Karush-Kuhn-Tucker stationary point and whether the
//! Mangasarian-Fromovitz constraint qualification fails there, and encodes
//! either fact as a combinatorial code (active indices plus minimal
//! multiplier-supporting index pairs). Around that core it provides:
//!
//! - a universal convex-quadratic normal form attached to any jet, with its
//!   parameter-to-jet Jacobian;
//! - exact solvers (rational simplex, rational projection QP) that make every
//!   verdict a decision rather than an estimate;
//! - structure-preserving transformations between stationary-point sets and
//!   MFCQ-violation sets, with their induced code actions;
//! - a tracer that follows stationary points over parameter grids and
//!   classifies boundary behavior.

pub mod code;
pub mod error;
pub mod examples;
pub mod jet;
pub mod linalg;
pub mod lp;
pub mod poly;
pub mod problem;
pub mod qp;
pub mod rational;
pub mod tracer;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use poly::Poly;
pub use problem::{
    CombinatorialCode, IndexPair, JetPoint, MfJetPoint, Multipliers, PolyProblem, ProblemSize,
};
pub use rational::Rational;
