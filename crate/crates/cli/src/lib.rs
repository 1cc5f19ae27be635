//! Command-line front end for `zoneplate`: config parsing and the
//! `design`, `efficiency`, `simulate` and `export` commands.

pub mod commands;
pub mod config;

use zoneplate::{Error, ErrorKind};

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err.kind() {
        ErrorKind::Config => 2,
        ErrorKind::Domain => 3,
        ErrorKind::Limit => 4,
    }
}
