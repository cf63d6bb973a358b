//! Command implementations behind the `apgen` binary: orbit listing,
//! reducible-prime censuses with a resumable cache, twist and density
//! reports, and the finite-group lab.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use error::AppError;
