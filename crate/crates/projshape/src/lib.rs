//! File formats, JSON reports and the command line front end for
//! `projshape-core`.

pub mod cli;
mod error;
pub mod format;
pub mod report;

pub use cli::run;
pub use error::{Error, Result};
pub use format::{load, save, Format};
