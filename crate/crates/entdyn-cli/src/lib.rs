//! Command-line front end for the certificate library: JSON run configs,
//! experiment dispatch, artifact writing, and sweep-level trend fits.
//!
//! Artifacts per run: a data CSV with fixed column order, `reports.json`
//! with the certificate reports, and `summary.txt`. Exit codes: 0 when all
//! exact-inequality certificates pass, 1 on certificate failure, 2 on config
//! errors, 3 when the dense-matrix resource guard refuses the request.

pub mod config;
pub mod error;
pub mod runner;
pub mod sweep;
