pub mod cli;
pub mod data;
pub mod error;
pub mod forward;
pub mod geometry;
pub mod imaging;
pub mod specfun;

pub use error::{Error, Result};
