//! Age of information in slotted random-access networks laid out as Poisson
//! bipolar point processes.
//!
//! The crate has three ways of computing the network average AoI, and the
//! point of having all three is to cross-check them against each other:
//!
//! * [`sim`] runs the slotted system exactly: Bernoulli arrivals into a
//!   unit LCFS-with-replacement buffer, ALOHA access, Rayleigh fading and an
//!   SINR threshold test, with per-link AoI bookkeeping.
//! * [`meanfield`] fixes one topology and solves the coupled
//!   success-probability / activity fixed point link by link, assuming the
//!   queues evolve independently.
//! * [`analysis`] works with the distribution of the conditional success
//!   probability over all topologies. It is obtained as the fixed point of a
//!   characteristic-function map inverted with the Gil-Pelaez formula, and
//!   then de-conditioned into the network average AoI.
//!
//! [`experiment`] wires these into parameter sweeps that emit CSV, and is
//! what the `aoi-mesh` binary drives.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod experiment;
pub mod geometry;
pub mod meanfield;
pub mod par;
pub mod rng;
pub mod sim;
pub mod topology;
pub mod units;

pub use config::{ConfigError, NetworkConfig, ValidatedConfig};
pub use topology::{sample_topology, Dipole, Topology};
