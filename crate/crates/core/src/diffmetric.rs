//! Symmetric-difference distance between pattern sets:
//! `d(A, B) = |A Δ B| / |A ∪ B|`, and `0` when both are empty.
//!
//! This is a metric (non-negative, zero only on equal sets, symmetric,
//! triangle inequality). Values stay exact until presentation.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;

use crate::miner::PatternSet;
use crate::stream_model::Sequence;

/// Membership-only view of a pattern set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PatternKeySet(BTreeSet<Sequence>);

impl PatternKeySet {
    pub fn new(keys: BTreeSet<Sequence>) -> Self {
        Self(keys)
    }

    /// Keys of the frequent section.
    pub fn frequent(set: &PatternSet) -> Self {
        Self(set.frequent.keys().cloned().collect())
    }

    /// Keys of both sections, for diagnostics.
    pub fn with_border(set: &PatternSet) -> Self {
        Self(
            set.frequent
                .keys()
                .chain(set.border.keys())
                .cloned()
                .collect(),
        )
    }

    pub fn keys(&self) -> &BTreeSet<Sequence> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<Sequence> for PatternKeySet {
    fn from_iter<I: IntoIterator<Item = Sequence>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// `|A Δ B|` over `|A ∪ B|`, unreduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Distance {
    pub sym_diff: usize,
    pub union: usize,
}

impl Distance {
    pub fn ratio(&self) -> Ratio<u64> {
        if self.union == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(self.sym_diff as u64, self.union as u64)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.union == 0 {
            0.0
        } else {
            self.sym_diff as f64 / self.union as f64
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} = {:.6}", self.sym_diff, self.union, self.to_f64())
    }
}

pub fn symmetric_difference(a: &PatternKeySet, b: &PatternKeySet) -> PatternKeySet {
    PatternKeySet(a.0.symmetric_difference(&b.0).cloned().collect())
}

pub fn distance(a: &PatternKeySet, b: &PatternKeySet) -> Distance {
    let common = a.0.intersection(&b.0).count();
    let union = a.len() + b.len() - common;
    Distance {
        sym_diff: union - common,
        union,
    }
}
