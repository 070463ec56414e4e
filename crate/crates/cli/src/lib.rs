//! Command-line front end: scenario files, command dispatch and
//! reproducible CSV/JSON output.

pub mod commands;
pub mod error;
pub mod output;
pub mod scenario;
pub mod summary;
pub mod tolerances;

pub use commands::{run, Command, RunOptions, OUT_ENV};
pub use error::{CliError, CliResult, ErrorRecord};
pub use scenario::{parse_scenario, parse_scenario_str, ParsedScenario, Scenario};
pub use summary::{Check, RunSummary};
pub use tolerances::{Profile, Tolerances};
