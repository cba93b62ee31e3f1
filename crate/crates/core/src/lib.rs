//! Simulation and verification laboratory for step-reinforced random walks.
//!
//! At each step the positively reinforced walk repeats a uniformly chosen
//! past step with probability p and draws a fresh i.i.d. step otherwise; the
//! negatively reinforced (counterbalanced) walk flips the sign of repeated
//! steps. The crate provides:
//!
//! - [`engine`]: fast path simulation, the genealogical-forest construction
//!   with occupancy counts N_j(n) and signed counts Delta_j(n), record
//!   replay, binary traces, and a deterministic parallel Monte Carlo driver;
//! - [`moments`]: exact finite-n moment recursions, gamma-ratio scaling
//!   sequences, and an exhaustive enumeration oracle for small horizons;
//! - [`limits`]: samplers for the limiting Gaussian processes (noise
//!   reinforced and counterbalanced Brownian motion) and LIL envelopes;
//! - [`verify`]: a statistical harness turning the limit theorems into
//!   seeded, reproducible pass/fail checks;
//! - [`cli`]: configuration and CSV/JSON export behind the `rwalk` binary.
//!
//! All randomness flows through [`rng::RngStream`], a counter-based stream
//! addressed by `(seed, stream_id)`: results are reproducible bit-for-bit
//! independent of platform and thread count.

pub mod cli;
pub mod config;
pub mod dist;
pub mod engine;
pub mod error;
pub mod limits;
pub mod moments;
pub mod rng;
pub mod stats;
pub mod verify;

pub use config::{Truncation, WalkConfig, WalkSign};
pub use dist::{DerivedConstants, Moment, StepDistribution, StepKind};
pub use error::{Error, Result};
pub use rng::RngStream;
