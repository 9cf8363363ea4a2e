//! Core model of a one-dimensional molecular-communication channel whose
//! molecule, transmitter, and receiver all undergo scaled Brownian motion
//! (mean square displacement `2 D t^alpha`).
//!
//! The crate is split along the processing pipeline:
//!
//! * [`sbm`] — scaled-Brownian-motion kinematics (MSD law, per-step
//!   increment variances, Gaussian step sampling, position law);
//! * [`quad`] — numerical backbone: adaptive Gauss–Kronrod quadrature on
//!   finite and semi-infinite intervals, error functions, and a bounded
//!   unimodal maximizer;
//! * [`fhtd`] — analytic first-hitting-time densities for static and
//!   mobile devices, the averaging-integral oracle, hitting CDFs, and the
//!   timing decision threshold;
//! * [`spbs`] — stochastic particle-based simulation producing empirical
//!   first-hit samples (the ground-truth oracle for `fhtd`);
//! * [`channel`] — timing-modulated binary erasure channel: transition
//!   probabilities, mutual information, and achievable-rate maximization.
//!
//! Everything is `no_std` (with `alloc`); IO, configuration, and
//! parallel execution live in the companion CLI crate.

#![no_std]

extern crate alloc;

pub mod channel;
pub mod erf;
pub mod fhtd;
pub mod quad;
pub mod sbm;
pub mod spbs;

pub use erf::{erf, erf_pair, erfc};
