//! Edge-offloading simulator for latency-constrained inference in a
//! pre-crash scenario.
//!
//! A vehicle approaching a crossing pedestrian must identify the hazard
//! before a kinematic deadline. Identification tasks can run on the
//! vehicle's own model or be offloaded over a shared V2I uplink to a
//! stronger edge-server model, trading added delay for lower inference
//! error. The crate provides:
//!
//! - [`kinematics`]: closed-form delay budgets of the pre-crash geometry;
//! - [`link`]: uplink and computing delay models;
//! - [`inference`]: the data-quality-driven error model;
//! - [`policy`]: optimal offloading probability and threshold rule;
//! - [`sim`]: the Monte Carlo sweep harness behind the CLI;
//! - [`config`]: the TOML run configuration with unit suffixes;
//! - [`artifacts`]: CSV and manifest emission.

pub mod artifacts;
pub mod config;
pub mod inference;
pub mod kinematics;
pub mod link;
pub mod policy;
pub mod rng;
pub mod sim;
