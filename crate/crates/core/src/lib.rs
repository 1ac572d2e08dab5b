// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod mathrep;
pub mod models;
pub mod synth;
pub mod tokenize;
pub mod viz;

pub use error::{Error, Result};
