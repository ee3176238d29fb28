#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod complex;
pub mod critical;
pub mod density;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod harness;
pub mod knn;
pub mod par;
pub mod persistence;
pub mod quad;
pub mod rng;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
