//! Command-line tools, file formats and the acceptance suite for
//! `sojourn-core`.

pub mod cli;
pub mod output;
pub mod parallel;
pub mod verify;
