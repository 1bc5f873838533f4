//! Link-level simulation library comparing pinching-antenna relaying with
//! RIS-assisted communication in mmWave device-to-device scenarios.
//!
//! The crate models two ways of bridging a blocked link between two users:
//! a waveguide-fed pinching antenna acting as a decode-and-forward relay
//! (four time slots) and a passive reconfigurable intelligent surface with
//! `M` phase-shifting elements (two time slots). It provides per-link SNR
//! budgets, Monte-Carlo spectral-efficiency estimators with matching
//! closed forms, hardware-impairment models, energy-efficiency metrics,
//! and a sweep harness that reproduces the reference experiments.
//!
//! All randomness flows through reproducible counter-based substreams:
//! rerunning any estimator with the same seed, trial count, and
//! configuration yields bit-identical results on any worker count.

pub mod channel;
pub mod config;
pub mod energy;
pub mod experiments;
pub mod mc;
pub mod pinching;
pub mod ris;
pub mod units;
pub mod validation;

pub use config::{
    FeederMode, PinchingConfig, PowerModel, RisConfig, ScenarioGeometry, SimConfig,
};
pub use experiments::{Metric, Scheme, SweepRow, SweepSpec, SweepVariable};
pub use mc::McEstimate;
