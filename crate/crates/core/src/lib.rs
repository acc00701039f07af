//! Spectrum sharing and power allocation between high-capacity UAV links
//! (UAV→base station and UAV→high-altitude platform) and reliability-constrained
//! UAV↔UAV links.
//!
//! The crate is organised bottom-up:
//!
//! * [`mathkernels`] — exponential integral and guarded bisection;
//! * [`channel`] — large-scale gains, unit conversions, Doppler;
//! * [`power`] — outage closed form and the boundary-optimal pair powers;
//! * [`capacity`] — closed-form ergodic capacity and the filtered capacity matrix;
//! * [`assignment`] — Hungarian solver with forbidden cells;
//! * [`algorithms`] — sum-capacity and max-min allocation plus baselines;
//! * [`energy`] — per-UAV energy budget;
//! * [`montecarlo`] — sampling oracles for every closed form;
//! * [`scenario`] — configuration and random scenario generation;
//! * [`experiments`] — sweeps, CSV output and validation reports.

pub mod algorithms;
pub mod assignment;
pub mod capacity;
pub mod channel;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod mathkernels;
pub mod montecarlo;
pub mod power;
pub mod scenario;

pub use error::{Error, Result};
