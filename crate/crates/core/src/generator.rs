//! Seeded synthetic event streams shaped like telecom alarm logs.
//!
//! Background events are uniform over `n_types` labels `ALM_000`,
//! `ALM_001`, ...; each tuple carries `1 + Poisson(tuple_fill - 1)` of them.
//! Embedded patterns are injected at a per-1000-tuple rate as occurrences
//! over consecutive tuples. After `drift_at` the alternate rate list applies.
//!
//! The random source is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`, so a config reproduces the same log everywhere.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::stream_model::{Alphabet, EventType, StreamQueue, StreamTuple};

/// A pattern given as type indices (`0..n_types`) and its injection rate.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedPattern {
    pub items: Vec<usize>,
    pub rate_per_1000: f64,
}

impl EmbeddedPattern {
    pub fn new(items: Vec<usize>, rate_per_1000: f64) -> Self {
        Self {
            items,
            rate_per_1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub n_types: usize,
    pub n_events: usize,
    pub seed: u64,
    pub embedded: Vec<EmbeddedPattern>,
    /// Tuple index from which `drift_embedded` replaces `embedded`.
    pub drift_at: Option<usize>,
    pub drift_embedded: Vec<EmbeddedPattern>,
    pub tuple_fill: f64,
}

impl GenConfig {
    pub fn new(n_types: usize, n_events: usize, seed: u64) -> Self {
        Self {
            n_types,
            n_events,
            seed,
            embedded: Vec::new(),
            drift_at: None,
            drift_embedded: Vec::new(),
            tuple_fill: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_types == 0 {
            return Err(Error::Param("n_types must be at least 1".into()));
        }
        if self.n_events == 0 {
            return Err(Error::Param("n_events must be at least 1".into()));
        }
        if !(self.tuple_fill >= 1.0 && self.tuple_fill.is_finite()) {
            return Err(Error::Param(format!(
                "tuple_fill {} must be >= 1",
                self.tuple_fill
            )));
        }
        for p in self.embedded.iter().chain(&self.drift_embedded) {
            if p.items.is_empty() {
                return Err(Error::Param("embedded pattern is empty".into()));
            }
            if let Some(&bad) = p.items.iter().find(|&&i| i >= self.n_types) {
                return Err(Error::Param(format!(
                    "embedded type {bad} >= n_types {}",
                    self.n_types
                )));
            }
            if !(p.rate_per_1000 >= 0.0 && p.rate_per_1000 <= 1000.0) {
                return Err(Error::Param(format!(
                    "rate {} outside [0, 1000] per 1000 tuples",
                    p.rate_per_1000
                )));
            }
        }
        if let Some(d) = self.drift_at {
            if d >= self.n_events {
                return Err(Error::Param(format!("drift_at {d} is beyond the stream")));
            }
        }
        Ok(())
    }

    pub fn label(&self, index: usize) -> String {
        let width = (self.n_types.saturating_sub(1)).to_string().len().max(3);
        format!("ALM_{index:0width$}")
    }
}

/// Builds the stream; it holds exactly `n_events` events.
pub fn generate(cfg: &GenConfig) -> Result<StreamQueue> {
    cfg.validate()?;
    let alphabet = Alphabet::from_sorted_labels((0..cfg.n_types).map(|i| cfg.label(i)))?;
    debug_assert!(
        (0..cfg.n_types).all(|i| alphabet.get(&cfg.label(i)) == Some(EventType(i as u32)))
    );

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let extra = if cfg.tuple_fill > 1.0 {
        Some(Poisson::new(cfg.tuple_fill - 1.0).map_err(|e| Error::Param(e.to_string()))?)
    } else {
        None
    };

    let mut pending: VecDeque<Vec<usize>> = VecDeque::new();
    let mut tuples = Vec::new();
    let mut events = 0usize;
    let mut time: i64 = 0;
    while events < cfg.n_events {
        let index = tuples.len();
        let k = 1 + extra.as_ref().map_or(0, |p| p.sample(&mut rng) as usize);
        let mut types: Vec<usize> = (0..k).map(|_| rng.random_range(0..cfg.n_types)).collect();
        types.extend(pending.pop_front().unwrap_or_default());

        let rates = match cfg.drift_at {
            Some(d) if index >= d => &cfg.drift_embedded,
            _ => &cfg.embedded,
        };
        for pattern in rates {
            if rng.random::<f64>() * 1000.0 < pattern.rate_per_1000 {
                types.push(pattern.items[0]);
                for (offset, &item) in pattern.items[1..].iter().enumerate() {
                    if pending.len() <= offset {
                        pending.resize(offset + 1, Vec::new());
                    }
                    pending[offset].push(item);
                }
            }
        }

        types.sort_unstable();
        types.dedup();
        types.truncate(cfg.n_events - events);
        events += types.len();
        tuples.push(StreamTuple::new(
            time,
            types.into_iter().map(|t| EventType(t as u32)).collect(),
        )?);
        time += 1 + rng.random_range(0..3i64);
    }
    StreamQueue::new(Arc::new(alphabet), tuples)
}
