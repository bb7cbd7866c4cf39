//! Input formats, reports and the `sublin` command-line driver.

pub mod cli;
pub mod commands;
pub mod error;
pub mod grid;
pub mod report;
pub mod schema;
pub mod table;

pub use commands::{run, Outcome};
pub use error::{Error, Result};
