//! Pipeline driver: ingest or synthesize sample data, fit surrogates,
//! compile to QUBO form, adapt to hardware limits, solve, decode, and report.

pub mod artifacts;
pub mod config;
pub mod errors;
pub mod pipeline;
pub mod synth;

pub use config::RunConfig;
pub use errors::{CliError, Result};
