//! Command-line harness around the `walksearch` library: graph-spec parsing,
//! CSV/JSON artifacts with manifests, and plot scripts.

pub mod commands;
pub mod config;
pub mod error;
pub mod graph_spec;
pub mod output;
pub mod plot;
pub mod table;

pub use commands::run;
pub use config::{Cli, RunConfig};
pub use error::CliError;
pub use graph_spec::{parse_graph_spec, SpecError};
