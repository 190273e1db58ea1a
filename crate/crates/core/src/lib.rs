//! Two-user downlink power allocation where both users may use both time
//! slots of a legacy TDMA schedule.
//!
//! The crate computes the OMA and hybrid-NOMA allocations in closed form,
//! solves the decomposed minimum-power problems, and checks optimality three
//! independent ways: KKT certificates, a convexity certificate for the
//! reduced scalar problem, and brute-force grid oracles. A seeded Monte
//! Carlo harness averages the three strategies over Rayleigh fading.
//!
//! All rates are in nats per channel use and the noise power is 1, so the
//! channel gains absorb the SNR.

pub mod analysis;
pub mod closed_form;
mod error;
pub mod model;
pub mod numeric;
pub mod simulation;
pub mod solver;

pub use error::{ModelError, Result};
pub use model::{ChannelPair, PowerAllocation, RateBreakdown, RateTarget};
