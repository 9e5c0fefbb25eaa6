//! Scene files, run reports, the command line and the kernel self-test for
//! the `gbem-core` capacitance extractor.

pub mod cli;
pub mod model;
pub mod report;
pub mod selftest;

pub use model::{dump_model, parse_model, ModelError};
