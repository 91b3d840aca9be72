//! Simulation and analysis of diffusion-based molecular channels in which a
//! limited amount of enzymes degrades messenger molecules inside a spherical
//! region around the receiver, around the transmitter, or spread widely.
//!
//! * [`geometry`]: bodies, enzyme regions and their volumes.
//! * [`kinetics`]: degradation rates and the volume-normalized half-life.
//! * [`analytic`]: closed-form hitting statistics for a point transmitter.
//! * [`engine`]: the Brownian particle simulator.
//! * [`metrics`]: received signals, ITR and the optimal enzyme radius.
//! * [`cli_io`]: experiment files, seeding, orchestration and CSV tables.

pub mod analytic;
pub mod cli_io;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod kinetics;
pub mod metrics;

pub use error::{Error, Result};
