//! File formats, reports and the `multipop` command line.
//!
//! Exit status of every command:
//!
//! | code | meaning                                                      |
//! |------|--------------------------------------------------------------|
//! | 0    | success, requested property holds                            |
//! | 1    | predicate, validation, condition (Gamma) or hypothesis fails |
//! | 2    | unreadable or malformed input, bad usage, dimension mismatch |
//! | 3    | no verified equilibrium (solver did not converge)            |
//! | 4    | non-monotone cost without `--allow-nonmonotone`             |
//! | 5    | grid exceeds the budget                                      |

pub mod commands;
pub mod error;
pub mod files;
pub mod render;

pub use commands::{run, Cli, Format, Report};
pub use error::{CliError, Exit};
