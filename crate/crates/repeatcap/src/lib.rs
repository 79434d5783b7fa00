//! Command-line driver for `repeatcap-core`: bound evaluation, parallel
//! sweeps, table verification, KL-gap profiles and the Poisson-repeat
//! simulator, with CSV and JSON output.

pub mod cli;
pub mod config;
pub mod error;
pub mod exec;
pub mod records;

pub use error::AppError;
