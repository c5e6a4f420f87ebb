//! Sequential pattern mining over timestamped event streams.
//!
//! The pieces fit together as follows: [`stream_model`] parses logs into
//! queues and windows, [`occurrence`] counts sequences, [`miner`] mines a
//! window from scratch, [`ius`] updates a mined window incrementally,
//! [`diffmetric`] measures how far two pattern sets are apart, and [`tpd`]
//! sweeps increment sizes to pick the ratio at which updating pays off.

pub mod cli;
pub mod diffmetric;
pub mod error;
pub mod generator;
pub mod ius;
pub mod miner;
pub mod occurrence;
pub mod pattern_file;
pub mod stream_model;
pub mod tpd;

pub use error::{Error, Result};
