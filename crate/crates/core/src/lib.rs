//! Quantifies how solar-irradiance forecast errors and battery sizing affect
//! the daily electricity cost of a PV home energy management system.
//!
//! The pipeline has three stages:
//!
//! 1. [`optimizer`] — a day-ahead LP that schedules battery charging and
//!    PV trading against a generation forecast, minimizing the daily bill.
//! 2. [`simulator`] — executes a committed plan against realized generation
//!    and settles the difference with the grid, yielding the realized cost.
//! 3. [`sensitivity`] + [`experiment`] — a Sobol/Saltelli variance-based
//!    sensitivity engine that treats plan-then-execute as a black box over
//!    hourly irradiance errors and battery capacity.
//!
//! The `hems` binary exposes the stages as subcommands; see the crate README.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod optimizer;
pub mod profiles;
pub mod sensitivity;
pub mod simplex;
pub mod simulator;

pub use error::{Error, Result};
