//! Command-line surface: JSON input, CSV output and the experiment drivers.

pub mod commands;
pub mod error;
pub mod input;
pub mod output;

pub use commands::{execute, run, Cli, Command, Outcome};
pub use error::{exit, CliError, CliResult};
pub use input::{parse_input, parse_input_str, random_datum, InputData};
pub use output::{read_csv, write_csv, Table};
