//! File formats, verification suites and the `mgcn` command-line interface
//! built on [`mgcn_core`].

pub mod cli;
pub mod error;
pub mod io;
pub mod verify;

pub use error::{Error, Result};
pub use mgcn_core;
