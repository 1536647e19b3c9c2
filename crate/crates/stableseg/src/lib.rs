//! Text formats, reports and command implementations on top of
//! `stableseg-core`.

pub mod commands;
pub mod error;
pub mod report;
pub mod text;

pub use error::{CliError, ParseError};
