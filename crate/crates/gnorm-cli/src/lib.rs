//! Command-line front end for the `gnorm` library.
//!
//! The binary is a thin dispatcher: every subcommand parses its inputs into
//! library types, calls exactly one library entry point, and serializes the
//! returned report into a fixed JSON (or flattened CSV) envelope.  All
//! randomness flows through explicit `--seed` flags, so a repeated invocation
//! with the same argument vector produces a byte-identical report.

mod cli;
mod input;
mod report;
mod run;

pub use cli::Cli;
pub use input::{matrix_to_csv, parse_matrix_csv, Family, ProfileSpec};
pub use report::Report;
pub use run::run;
