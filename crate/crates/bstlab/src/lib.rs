//! Reproducible Monte Carlo harness, verification suite and output formats
//! for the tree-growth models in `bstlab-core`.

pub mod acceptance;
pub mod config;
pub mod harness;
pub mod report;

pub use bstlab_core as core;
