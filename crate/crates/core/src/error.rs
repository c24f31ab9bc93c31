// Copyright 2026 The freqmdp Authors
// SPDX-License-Identifier: Apache-2.0

use std::io;

use thiserror::Error;

/// Errors surfaced by every layer of the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("incompatible sketches: {0}")]
    IncompatibleSketch(String),
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("wrong protocol: {0}")]
    WrongProtocol(String),
    #[error("decode error: {0}")]
    Decode(String),
    #[error("data error at line {line}: {msg}")]
    Data { line: usize, msg: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("counter overflow")]
    Overflow,
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
