//! Simulator and certificate toolkit for the depinning of a dislocation line
//! (an elastic interface in graph form) driven through a random field of
//! localized obstacles.
//!
//! The crate has five layers:
//!
//! * [`obstacle`] — Poisson obstacle fields with a mollified pinning-strength
//!   profile `phi`, lazily extended in y-strips, deterministically seeded.
//! * [`front`] — explicit time stepping of the graph evolution
//!   `eps v + (tau + phi) sgn(v) = curvature + F` with exact stick/slip,
//!   plus outcome classification (pinned / ballistic / undecided).
//! * [`cert`] — constructive certificates: stationary supersolution barriers
//!   (lower bounds on the critical force) and obstacle-free propagation
//!   corridors (upper bounds), both re-verifiable by sampling.
//! * [`critical`] — bisection for the critical force, density sweeps, the
//!   scaling fit of the critical-force gap, and certificate sandwiches.
//! * [`config`] / [`report`] — experiment configuration, deterministic
//!   parallel orchestration, and self-describing CSV/JSON outputs.
//!
//! All randomness flows from explicit `u64` seeds through counter-based
//! substreams, so every artifact is reproducible bit for bit regardless of
//! worker count or band-extension order.

// Validation guards use negated comparisons (`!(x > 0.0)`) deliberately:
// they must reject NaN, which every positively phrased comparison accepts.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cert;
pub mod config;
pub mod critical;
pub mod error;
pub mod front;
pub mod numeric;
pub mod obstacle;
pub mod report;
pub mod rng;

pub use error::{Error, Result};

/// Version string embedded in every output file.
pub const VERSION: &str = concat!("depinning ", env!("CARGO_PKG_VERSION"));
