//! Library surface of the CLI: input formats and command orchestration,
//! exposed so integration tests can drive everything in-process.

pub mod commands;
pub mod lattice_format;

pub use commands::{
    run, CommandKind, RunConfig, RunError, RunSummary, EXIT_OK, EXIT_OTHER, EXIT_PARSE,
    EXIT_TURNING_POINT, EXIT_VALIDITY_FAIL,
};
pub use lattice_format::{
    parse_lattice, parse_profile_csv, serialize_lattice, serialize_profile_csv, LatticeFile,
    ParseError, PROFILE_HEADER,
};
