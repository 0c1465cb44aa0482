// NaN-rejecting comparisons like `!(x > 0.0)` are deliberate, and reference
// constants keep every digit of their oracle value.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod convex_order;
pub mod entropy;
pub mod inequalities;
pub mod lattice;
pub mod measures;
pub mod numerics;
pub mod report;
pub mod specfun;
pub mod suite;
pub mod transport;
