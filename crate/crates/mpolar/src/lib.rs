//! High-frequency truncated-resolvent experiments for Schrödinger operators
//! with multipolar inverse-square potentials.
//!
//! The crate assembles semiclassically rescaled operators
//! h^2 (-Δ + V) - (1 - i α h) with complex absorbing layers, measures
//! truncated-resolvent norms across frequency sweeps, and evaluates
//! phase-space (Husimi) diagnostics of the computed quasimodes: shell
//! localization, transport invariance, pole masses and flux ledgers.

pub mod error;
pub mod config;
pub mod experiments;
pub mod grid;
pub mod husimi;
pub mod linalg;
pub mod operator;
pub mod potential;
pub mod quasimode;
pub mod report;
pub mod radial;
pub mod resolvent;
pub mod rng;
pub mod sphere;

pub use error::{Error, Result};
