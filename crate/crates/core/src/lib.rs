//! Operational-importance weights for power-grid telemetry signals and the
//! observability indices built on them.
//!
//! Experts compare quantities within each component and components within
//! each quantity; [`ahp`] turns those pairwise judgments into the M and N
//! weight tables. A signal's weight is `M × N`, doubled when an operating
//! instruction names it. [`observability`] scores snapshots of tagged
//! signals per station or area, with and without the weights, and compares
//! score sets over time.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod ahp;
pub mod cli;
pub mod error;
pub mod ingest;
pub mod observability;
pub mod report;
pub mod service;
pub mod taxonomy;

pub use error::{Error, Result};
