//! Streaming extraction of EOSIO-style chain data into seven CSV datasets,
//! a buffered trace collector, dataset statistics and a synthetic chain
//! generator used as a test oracle.

pub mod config;
pub mod dataset;
pub mod error;
pub mod ingest;
pub mod pipeline;
pub mod stats_run;
pub mod synth;
pub mod validate;

pub use error::{Error, Result};
