use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("window [{start}, {end}) out of range for queue of {len} tuples")]
    Bounds {
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("incompatible pattern sets: {0}")]
    Incompatible(String),

    #[error("support is undefined on an empty window")]
    EmptyWindow,

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("oracle bound exceeded: {0}")]
    OracleBound(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
