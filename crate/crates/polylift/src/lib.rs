//! File formats, seeded generators and the command line front end for
//! [`polylift_core`].

pub mod cli;
pub mod format;
pub mod generate;

pub use polylift_core as core;
