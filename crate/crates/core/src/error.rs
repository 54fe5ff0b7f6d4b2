use std::io;

use thiserror::Error;

/// Errors produced by the coding and bound-evaluation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A bit or byte stream could not be decoded.
    #[error("decode error: {0}")]
    Decode(String),
    /// A container header is malformed or of an unknown version.
    #[error("format error: {0}")]
    Format(String),
    /// A configured size or arithmetic budget would be exceeded.
    #[error("resource error: {0}")]
    Resource(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn decode<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Decode(msg.into()))
}
