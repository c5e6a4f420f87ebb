//! Incremental update of frequent sequences and negative border.
//!
//! Given the pattern sets of `W_k` and of the increment `ΔW`, produces the
//! pattern set of `W_k + ΔW`. Counts already stored in either input are
//! reused; everything else is rescanned in the block that lacks it.
//!
//! Frequent-set completeness rests on a pigeonhole argument: with strict
//! thresholds, `c1 + c2 > σ(n1 + n2)` forces `c1 > σ n1` or `c2 > σ n2`, so
//! every frequent sequence of the union is frequent in one of the parts.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::miner::{gen_candidates, Class, MiningParams, PatternSet};
use crate::occurrence::{BlockCounter, CostCounter};
use crate::stream_model::{check_contiguous, Sequence, ViewWindow};

#[derive(Debug, Clone, Copy)]
pub struct UpdateInput<'a, 'q> {
    pub old: &'a PatternSet,
    pub delta: &'a PatternSet,
    pub old_blocks: &'a [ViewWindow<'q>],
    pub delta_blocks: &'a [ViewWindow<'q>],
    pub params: MiningParams,
}

/// Work done by one update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IusStats {
    pub cost: CostCounter,
    /// Candidates whose `W_k` count had to be rescanned.
    pub rescans_old: u64,
    /// Candidates whose `ΔW` count had to be rescanned.
    pub rescans_delta: u64,
}

pub fn ius_update(input: &UpdateInput<'_, '_>) -> Result<PatternSet> {
    ius_update_with_stats(input).map(|(set, _)| set)
}

pub fn ius_update_with_stats(input: &UpdateInput<'_, '_>) -> Result<(PatternSet, IusStats)> {
    validate(input)?;
    Updater::new(input).run()
}

fn validate(input: &UpdateInput<'_, '_>) -> Result<()> {
    if input.old.params != input.params || input.delta.params != input.params {
        return Err(Error::Incompatible(
            "old and delta pattern sets were mined with different parameters".into(),
        ));
    }
    for (name, set, blocks) in [
        ("old", input.old, input.old_blocks),
        ("delta", input.delta, input.delta_blocks),
    ] {
        let ids: Vec<_> = blocks.iter().map(ViewWindow::block_id).collect();
        let size: usize = blocks.iter().map(ViewWindow::size).sum();
        if set.window_size != size as u64 || set.blocks != ids {
            return Err(Error::Contract(format!(
                "{name} pattern set does not describe the supplied blocks"
            )));
        }
    }
    let all: Vec<ViewWindow<'_>> = input
        .old_blocks
        .iter()
        .chain(input.delta_blocks)
        .copied()
        .collect();
    check_contiguous(&all)
}

#[derive(Clone, Copy)]
enum Side {
    Old,
    Delta,
}

/// Stored entries of one input still eligible for processing, by length.
struct Remaining {
    frequent: BTreeMap<usize, BTreeSet<Sequence>>,
    border: BTreeMap<usize, BTreeSet<Sequence>>,
}

impl Remaining {
    fn new(set: &PatternSet) -> Self {
        let by_len = |m: &BTreeMap<Sequence, u64>| {
            let mut out: BTreeMap<usize, BTreeSet<Sequence>> = BTreeMap::new();
            for s in m.keys() {
                out.entry(s.len()).or_default().insert(s.clone());
            }
            out
        };
        Self {
            frequent: by_len(&set.frequent),
            border: by_len(&set.border),
        }
    }

    fn take_frequent(&mut self, len: usize) -> BTreeSet<Sequence> {
        self.frequent.remove(&len).unwrap_or_default()
    }

    fn take_border(&mut self, len: usize) -> BTreeSet<Sequence> {
        self.border.remove(&len).unwrap_or_default()
    }

    /// Drops every longer entry containing `seq`.
    fn prune_containing(&mut self, seq: &Sequence) {
        for map in [&mut self.frequent, &mut self.border] {
            for (_, level) in map.range_mut(seq.len() + 1..) {
                level.retain(|u| !seq.is_subsequence_of(u));
            }
        }
    }
}

struct Updater<'a, 'q> {
    input: &'a UpdateInput<'a, 'q>,
    old_counter: OnceLock<BlockCounter>,
    delta_counter: OnceLock<BlockCounter>,
    old_rest: Remaining,
    delta_rest: Remaining,
    result: PatternSet,
    seen: HashSet<Sequence>,
    stats: IusStats,
}

/// Per-candidate counts, with whether each side was rescanned.
struct Counted {
    seq: Sequence,
    old: u64,
    delta: u64,
    old_rescanned: bool,
    delta_rescanned: bool,
}

impl<'a, 'q> Updater<'a, 'q> {
    fn new(input: &'a UpdateInput<'a, 'q>) -> Self {
        let blocks = input
            .old
            .blocks
            .iter()
            .chain(&input.delta.blocks)
            .copied()
            .collect();
        Self {
            input,
            old_counter: OnceLock::new(),
            delta_counter: OnceLock::new(),
            old_rest: Remaining::new(input.old),
            delta_rest: Remaining::new(input.delta),
            result: PatternSet::empty(
                input.params,
                input.old.window_size + input.delta.window_size,
                blocks,
            ),
            seen: HashSet::new(),
            stats: IusStats::default(),
        }
    }

    fn counter(&self, side: Side) -> &BlockCounter {
        let p = &self.input.params.count;
        match side {
            Side::Old => self
                .old_counter
                .get_or_init(|| BlockCounter::new(self.input.old_blocks, p)),
            Side::Delta => self
                .delta_counter
                .get_or_init(|| BlockCounter::new(self.input.delta_blocks, p)),
        }
    }

    fn stored(&self, side: Side) -> &'a PatternSet {
        match side {
            Side::Old => self.input.old,
            Side::Delta => self.input.delta,
        }
    }

    /// Counts for each candidate: stored value when either section of the
    /// side's input holds it, otherwise a rescan of that side's blocks.
    fn count(&mut self, seqs: Vec<Sequence>) -> Vec<Counted> {
        if seqs
            .iter()
            .any(|s| self.stored(Side::Old).count(s).is_none())
        {
            self.counter(Side::Old);
        }
        if seqs
            .iter()
            .any(|s| self.stored(Side::Delta).count(s).is_none())
        {
            self.counter(Side::Delta);
        }
        let old = self.input.old;
        let delta = self.input.delta;
        let old_counter = self.old_counter.get();
        let delta_counter = self.delta_counter.get();
        let counted: Vec<Counted> = seqs
            .into_par_iter()
            .map(|seq| {
                let (o, o_rescan) = match old.count(&seq) {
                    Some(c) => (c, false),
                    None => (old_counter.expect("initialized above").count(&seq), true),
                };
                let (d, d_rescan) = match delta.count(&seq) {
                    Some(c) => (c, false),
                    None => (delta_counter.expect("initialized above").count(&seq), true),
                };
                Counted {
                    seq,
                    old: o,
                    delta: d,
                    old_rescanned: o_rescan,
                    delta_rescanned: d_rescan,
                }
            })
            .collect();

        for c in &counted {
            for (rescanned, side) in [
                (c.old_rescanned, Side::Old),
                (c.delta_rescanned, Side::Delta),
            ] {
                if rescanned {
                    self.stats.cost.window_evaluations += self.counter(side).unit_cost();
                    match side {
                        Side::Old => self.stats.rescans_old += 1,
                        Side::Delta => self.stats.rescans_delta += 1,
                    }
                } else {
                    self.stats.cost.lookups += 1;
                }
            }
        }
        counted
    }

    /// Inserts into `L` or `NBD` of the result; returns the class.
    fn classify(&mut self, c: &Counted) -> Class {
        let total = c.old + c.delta;
        let class = self.input.params.classify(total, self.result.window_size);
        match class {
            Class::Frequent => {
                self.result.frequent.insert(c.seq.clone(), total);
            }
            Class::Border => {
                self.result.border.insert(c.seq.clone(), total);
            }
            Class::Infrequent => {}
        }
        self.seen.insert(c.seq.clone());
        class
    }

    fn subsets_frequent(&self, seq: &Sequence) -> bool {
        seq.deletions()
            .all(|d| self.result.frequent.contains_key(&d))
    }

    fn run(mut self) -> Result<(PatternSet, IusStats)> {
        let params = self.input.params;
        let old = self.input.old;
        let delta = self.input.delta;

        // Level 1: every 1-sequence stored by either part.
        let mut singles: BTreeSet<Sequence> = BTreeSet::new();
        for set in [&mut self.old_rest, &mut self.delta_rest] {
            singles.extend(set.take_frequent(1));
            singles.extend(set.take_border(1));
        }
        let mut grew = false;
        for c in self.count(singles.into_iter().collect()) {
            let class = self.classify(&c);
            grew |= class == Class::Frequent;
            if class != Class::Frequent {
                if old.frequent.contains_key(&c.seq) {
                    self.old_rest.prune_containing(&c.seq);
                }
                if delta.frequent.contains_key(&c.seq) {
                    self.delta_rest.prune_containing(&c.seq);
                }
            }
        }

        let mut len = 2;
        while grew && params.allows_len(len) {
            grew = false;

            // Frequent in W_k.
            let cands: Vec<Sequence> = self
                .old_rest
                .take_frequent(len)
                .into_iter()
                .filter(|s| self.subsets_frequent(s))
                .collect();
            for c in self.count(cands) {
                match self.classify(&c) {
                    Class::Frequent => grew = true,
                    _ => self.old_rest.prune_containing(&c.seq),
                }
            }

            // Frequent in ΔW only.
            let cands: Vec<Sequence> = self
                .delta_rest
                .take_frequent(len)
                .into_iter()
                .filter(|s| !old.frequent.contains_key(s) && self.subsets_frequent(s))
                .collect();
            for c in self.count(cands) {
                match self.classify(&c) {
                    Class::Frequent => grew = true,
                    _ => self.delta_rest.prune_containing(&c.seq),
                }
            }

            // Border of W_k not stored for ΔW, and vice versa.
            let cands: Vec<Sequence> = self
                .old_rest
                .take_border(len)
                .into_iter()
                .filter(|s| !delta.contains(s) && self.subsets_frequent(s))
                .collect();
            for c in self.count(cands) {
                grew |= self.classify(&c) == Class::Frequent;
            }
            let cands: Vec<Sequence> = self
                .delta_rest
                .take_border(len)
                .into_iter()
                .filter(|s| !old.contains(s) && self.subsets_frequent(s))
                .collect();
            for c in self.count(cands) {
                grew |= self.classify(&c) == Class::Frequent;
            }

            // Remaining border candidates generated from L_{len-1}(W_{k+1}).
            let prev = self.result.frequent_at(len - 1);
            let cands: Vec<Sequence> = gen_candidates(&prev)?
                .into_iter()
                .filter(|s| !self.seen.contains(s))
                .collect();
            for c in self.count(cands) {
                grew |= self.classify(&c) == Class::Frequent;
            }

            len += 1;
        }

        debug_assert!(self.result.validate().is_ok());
        Ok((self.result, self.stats))
    }
}

/// `t_full / t_ius`, in whatever unit both were measured.
pub fn speedup(t_full: f64, t_ius: f64) -> Result<f64> {
    if t_ius <= 0.0 || !t_ius.is_finite() {
        return Err(Error::DivisionByZero(
            "incremental update time must be positive",
        ));
    }
    Ok(t_full / t_ius)
}
