//! Levelwise miner for frequent sequences and their negative border.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::occurrence::{BlockCounter, CostCounter, CountParams};
use crate::stream_model::{check_contiguous, BlockId, Sequence, ViewWindow};

/// Support threshold in `(0, 1]`, kept as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Threshold(Ratio<u64>);

impl Threshold {
    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::Param("threshold denominator is zero".into()));
        }
        let r = Ratio::new(numer, denom);
        if r == Ratio::from_integer(0) || r > Ratio::from_integer(1) {
            return Err(Error::Param(format!("threshold {r} outside (0, 1]")));
        }
        Ok(Self(r))
    }

    pub fn ratio(&self) -> Ratio<u64> {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// `count > self * size`, compared exactly.
    pub fn exceeded_by(&self, count: u64, size: u64) -> bool {
        count as u128 * *self.0.denom() as u128 > *self.0.numer() as u128 * size as u128
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Accepts decimals (`0.0020`) and fractions (`1/500`).
impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Param(format!("cannot parse threshold {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: u64 = n.trim().parse().map_err(|_| bad())?;
            let d: u64 = d.trim().parse().map_err(|_| bad())?;
            return Self::new(n, d);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 18 {
            return Err(bad());
        }
        let denom = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac_v: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let numer = int
            .checked_mul(denom)
            .and_then(|v| v.checked_add(frac_v))
            .ok_or_else(bad)?;
        Self::new(numer, denom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MiningParams {
    pub min_supp: Threshold,
    pub min_nbd_supp: Threshold,
    pub count: CountParams,
    pub max_len: Option<usize>,
}

impl MiningParams {
    pub fn new(
        min_supp: Threshold,
        min_nbd_supp: Threshold,
        count: CountParams,
        max_len: Option<usize>,
    ) -> Result<Self> {
        if min_nbd_supp > min_supp {
            return Err(Error::Param(format!(
                "min_nbd_supp {min_nbd_supp} exceeds min_supp {min_supp}"
            )));
        }
        if max_len == Some(0) {
            return Err(Error::Param("max_len must be at least 1".into()));
        }
        Ok(Self {
            min_supp,
            min_nbd_supp,
            count,
            max_len,
        })
    }

    pub fn span(&self) -> usize {
        self.count.span()
    }

    pub fn classify(&self, count: u64, window_size: u64) -> Class {
        if self.min_supp.exceeded_by(count, window_size) {
            Class::Frequent
        } else if self.min_nbd_supp.exceeded_by(count, window_size) {
            Class::Border
        } else {
            Class::Infrequent
        }
    }

    pub(crate) fn allows_len(&self, len: usize) -> bool {
        self.max_len.is_none_or(|m| len <= m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Frequent,
    Border,
    Infrequent,
}

/// Frequent sequences `L` and negative border `NBD` of one window, with
/// their occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    pub params: MiningParams,
    pub window_size: u64,
    pub frequent: BTreeMap<Sequence, u64>,
    pub border: BTreeMap<Sequence, u64>,
    pub blocks: Vec<BlockId>,
}

impl PatternSet {
    pub fn empty(params: MiningParams, window_size: u64, blocks: Vec<BlockId>) -> Self {
        Self {
            params,
            window_size,
            frequent: BTreeMap::new(),
            border: BTreeMap::new(),
            blocks,
        }
    }

    /// Stored count from either section.
    pub fn count(&self, seq: &Sequence) -> Option<u64> {
        self.frequent
            .get(seq)
            .or_else(|| self.border.get(seq))
            .copied()
    }

    pub fn contains(&self, seq: &Sequence) -> bool {
        self.frequent.contains_key(seq) || self.border.contains_key(seq)
    }

    pub fn frequent_at(&self, len: usize) -> BTreeSet<Sequence> {
        self.frequent
            .keys()
            .filter(|s| s.len() == len)
            .cloned()
            .collect()
    }

    pub fn max_frequent_len(&self) -> usize {
        self.frequent.keys().map(Sequence::len).max().unwrap_or(0)
    }

    /// Checks thresholds, disjointness, border subset condition and
    /// downward closure. Counts are taken as given.
    pub fn validate(&self) -> Result<()> {
        let n = self.window_size;
        let block_total: usize = self.blocks.iter().map(|b| b.size).sum();
        if block_total as u64 != n {
            return Err(Error::Contract(format!(
                "blocks cover {block_total} tuples but window size is {n}"
            )));
        }
        for (s, &c) in &self.frequent {
            if self.params.classify(c, n) != Class::Frequent {
                return Err(Error::Contract(format!("{s:?}:{c} is not above min_supp")));
            }
            if let Some(d) = s.deletions().find(|d| !self.frequent.contains_key(d)) {
                return Err(Error::Contract(format!(
                    "{s:?} is frequent but {d:?} is not"
                )));
            }
            if !self.params.allows_len(s.len()) {
                return Err(Error::Contract(format!("{s:?} exceeds max_len")));
            }
        }
        for (s, &c) in &self.border {
            if self.frequent.contains_key(s) {
                return Err(Error::Contract(format!("{s:?} is in both sections")));
            }
            if self.params.classify(c, n) != Class::Border {
                return Err(Error::Contract(format!(
                    "{s:?}:{c} is outside the border band"
                )));
            }
            if s.deletions().any(|d| !self.frequent.contains_key(&d)) {
                return Err(Error::Contract(format!(
                    "{s:?} has an infrequent subsequence"
                )));
            }
            if !self.params.allows_len(s.len()) {
                return Err(Error::Contract(format!("{s:?} exceeds max_len")));
            }
        }
        Ok(())
    }
}

/// Candidates of length `m` from frequent sequences of length `m - 1`.
///
/// For `m = 2` every ordered pair (repeats included). Otherwise `s` and `t`
/// join when `s` without its first item equals `t` without its last item,
/// giving `s` followed by `t`'s last item; candidates with any one-item
/// deletion outside the input are dropped.
pub fn gen_candidates(prev: &BTreeSet<Sequence>) -> Result<BTreeSet<Sequence>> {
    let Some(len) = prev.first().map(Sequence::len) else {
        return Ok(BTreeSet::new());
    };
    if prev.iter().any(|s| s.len() != len) {
        return Err(Error::Contract(
            "gen_candidates needs sequences of one length".into(),
        ));
    }
    let mut out = BTreeSet::new();
    if len == 1 {
        for x in prev {
            for y in prev {
                out.insert(x.extended(y.first()));
            }
        }
        return Ok(out);
    }

    let mut by_prefix: HashMap<&[_], Vec<&Sequence>> = HashMap::new();
    for t in prev {
        by_prefix.entry(&t.items()[..len - 1]).or_default().push(t);
    }
    for s in prev {
        let Some(partners) = by_prefix.get(&s.items()[1..]) else {
            continue;
        };
        for t in partners {
            let cand = s.extended(t.last());
            if cand.deletions().all(|d| prev.contains(&d)) {
                out.insert(cand);
            }
        }
    }
    Ok(out)
}

pub fn mine(blocks: &[ViewWindow<'_>], params: &MiningParams) -> Result<PatternSet> {
    mine_with_cost(blocks, params).map(|(set, _)| set)
}

/// [`mine`], also reporting the counting work performed.
pub fn mine_with_cost(
    blocks: &[ViewWindow<'_>],
    params: &MiningParams,
) -> Result<(PatternSet, CostCounter)> {
    check_contiguous(blocks)?;
    let counter = BlockCounter::new(blocks, &params.count);
    Ok(mine_indexed(
        &counter,
        blocks.iter().map(ViewWindow::block_id).collect(),
        params,
    ))
}

pub(crate) fn mine_indexed(
    counter: &BlockCounter,
    block_ids: Vec<BlockId>,
    params: &MiningParams,
) -> (PatternSet, CostCounter) {
    let n = counter.window_size() as u64;
    let mut set = PatternSet::empty(*params, n, block_ids);
    let mut cost = CostCounter::default();

    let mut level: BTreeSet<Sequence> = counter
        .present_types()
        .into_iter()
        .map(Sequence::single)
        .collect();
    let mut len = 1;
    while !level.is_empty() && params.allows_len(len) {
        let counts = count_all(counter, &level);
        cost.window_evaluations += counter.unit_cost() * level.len() as u64;
        let mut grew = false;
        for (seq, c) in level.into_iter().zip(counts) {
            match params.classify(c, n) {
                Class::Frequent => {
                    set.frequent.insert(seq, c);
                    grew = true;
                }
                Class::Border => {
                    set.border.insert(seq, c);
                }
                Class::Infrequent => {}
            }
        }
        if !grew {
            break;
        }
        level = gen_candidates(&set.frequent_at(len)).expect("uniform length");
        len += 1;
    }
    (set, cost)
}

pub(crate) fn count_all(counter: &BlockCounter, seqs: &BTreeSet<Sequence>) -> Vec<u64> {
    let seqs: Vec<&Sequence> = seqs.iter().collect();
    seqs.par_iter().map(|s| counter.count(s)).collect()
}
