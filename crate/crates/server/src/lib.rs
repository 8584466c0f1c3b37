//! HTTP platform and command-line front end for the `evograd` library.

pub mod api;
pub mod cli;

pub use api::{router, AppState, ServiceConfig};
