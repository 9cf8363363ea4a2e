//! Experiment runner for the scaled-Brownian-motion channel model.
//!
//! The binary front-end lives in `main.rs`; everything it does is
//! reachable through this library so the integration and acceptance
//! suites can drive the exact same code paths.

pub mod commands;
pub mod config;
pub mod csvout;
pub mod runner;
