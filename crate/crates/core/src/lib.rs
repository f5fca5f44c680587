//! Packet-level simulator for geographic and virtual-coordinate routing in
//! wireless sensor networks.
//!
//! The crate is organised bottom-up:
//!
//! - [`topology`]: deployments, unit-disk graphs, hop-count oracles and
//!   localization error.
//! - [`vcs`]: anchor selection, hop-count virtual coordinates and VC zone
//!   analysis.
//! - [`metrics`]: geographic and virtual-coordinate distances and the
//!   forwarding set.
//! - [`protocols`]: per-hop step functions for shortest path, greedy
//!   forwarding, GPSR, VCap, LCR, BVR and the hybrid geographic/VC router.
//! - [`engine`]: drives packets hop by hop and records outcomes.
//! - [`anomaly`]: scenario-wide counts of virtual-coordinate failure modes.
//! - [`harness`]: configuration, experiments, sweeps and CSV output.
//!
//! Everything is deterministic given a seed; see [`rng`] for the stream
//! contract.

pub mod anomaly;
pub mod engine;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod numfmt;
pub mod protocols;
pub mod rng;
pub mod topology;
pub mod vcs;

pub use error::{Error, Result};
pub use topology::{Deployment, Graph, NodeId, NodeRecord, Point};
pub use vcs::{AnchorSet, VcTable};
