//! Command-line front end for `posmap-core`: the JSON exchange format for maps
//! and certificates, run reports, and re-verification of saved results.

pub mod commands;
pub mod document;
pub mod error;
pub mod json;
pub mod report;
pub mod reverify;

pub use commands::{run, RunOutput};
pub use document::MapDocument;
pub use error::{CliError, CliResult};
