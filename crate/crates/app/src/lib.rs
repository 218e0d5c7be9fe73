//! Command line and HTTP front end for dform.

pub mod cli;
pub mod config;
pub mod job;
pub mod server;
