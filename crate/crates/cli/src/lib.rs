//! Command-line front end for the streaming discriminant toolkit: train a
//! model in one pass, evaluate retrieval quality, audit the sketch accuracy
//! guarantees, and generate synthetic benchmark data.
//!
//! The pieces live in a library crate so integration tests can drive the
//! exact command implementations in-process (for example to count how often
//! the training pass reads its input).

pub mod commands;
pub mod config;
pub mod formats;
pub mod synth;
