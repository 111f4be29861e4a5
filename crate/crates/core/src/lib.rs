#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod domain;
pub mod environments;
pub mod error;
pub mod evaluation;
pub mod harness;
pub mod games;
pub mod oracles;

pub use error::{Error, Result};
