pub mod arith;
pub mod bitio;
pub mod bounds;
pub mod cli;
pub mod codec;
pub mod envelope;
pub mod error;
pub mod kt;
pub mod sim;
pub mod special;

pub use error::{Error, Result};
