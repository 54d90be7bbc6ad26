//! Geometry of the unit ball of `C^n`, Bergman trees, mean oscillation and a
//! matrix model of Hankel operators and commutators on weighted Bergman spaces.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod geometry;
pub mod kernels;
pub mod measure;
pub mod operator;
pub mod polar;
pub mod special;
pub mod symbol;
pub mod tree;
