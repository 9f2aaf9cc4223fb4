pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod manifest;
pub mod model;
pub mod sim;

pub use error::{Error, Result};
