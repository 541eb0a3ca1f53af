//! File formats, result records and the command-line front end for
//! `conejsr-core`.

pub mod commands;
pub mod record;
pub mod spec;

pub use commands::{run, Cli, Command, Exit, Outcome};
pub use record::ResultRecord;
pub use spec::{load_family, save_family, FamilySpec, MapSpec};
