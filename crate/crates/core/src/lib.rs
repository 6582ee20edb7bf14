//! Exact-arithmetic verification and search for k-th power Diophantine
//! tuples, and a mechanical replay of the finite case analysis showing that
//! no triple of the form {a^k, b, c} with 1 < a^k < b < c exists for k >= 3.
//!
//! The crate is organized bottom-up:
//!
//! * [`arith`]: integer k-th roots, perfect-power detection, binomials;
//! * [`cf`]: certified continued fractions of irrational k-th roots;
//! * [`interval`] / [`bounds`]: directed rational intervals and the
//!   effective irrationality-measure evaluators built on them;
//! * [`tuples`]: tuple predicates, generators, and brute-force search;
//! * [`elimination`]: the k = 3 and k = 4 candidate sweeps and the prime
//!   closure, producing auditable [`report`] values.
//!
//! Everything is exact: big integers, exact rationals, and directed-rounding
//! enclosures for the handful of transcendental quantities. No verdict in a
//! replay rests on floating point.

pub mod arith;
pub mod bounds;
pub mod cf;
pub(crate) mod dyadic;
pub mod elimination;
pub mod interval;
pub mod report;
pub mod tuples;

pub use bounds::{BoundEnvelope, BoundsError};
pub use cf::{CfError, SurdExpansion};
pub use elimination::{K3Candidate, K3Options, ReplayError};
pub use interval::RationalInterval;
pub use report::{EliminationRecord, ReplayReport, Verdict};
pub use tuples::{PowerTuple, TupleCheck, TupleError};
