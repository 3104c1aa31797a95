//! Front end for relative monodromy runs: configs and fixtures, a
//! content-hash cache of loop extractions, JSON/text reports and SVG plots.

pub mod cache;
pub mod config;
pub mod pipeline;
pub mod plot;
pub mod report;

/// Environment variable that overrides `--cache`.
pub const CACHE_ENV: &str = "MONODROMY_CACHE";
