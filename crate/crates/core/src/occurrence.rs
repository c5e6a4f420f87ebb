//! Occurrence and support counting.
//!
//! A sequence occurs at start position `i` of a window when the sub-window
//! `[i, i + span)` contains it, i.e. its items can be matched to strictly
//! increasing tuple indices. `occur` counts such start positions. Counts over
//! a list of blocks are the per-block sum; no occurrence crosses a boundary.
//!
//! Two implementations exist: the direct scan ([`occur`]) and the indexed
//! counter ([`BlockIndex`]) used by the miners. Tests check one against the
//! other.

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign};

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::miner::{MiningParams, PatternSet, Threshold};
use crate::stream_model::{EventType, Sequence, StreamTuple, ViewWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CountParams {
    span: usize,
}

impl CountParams {
    pub fn new(span: usize) -> Result<Self> {
        if span == 0 {
            return Err(Error::Param("span must be at least 1".into()));
        }
        Ok(Self { span })
    }

    pub fn span(&self) -> usize {
        self.span
    }

    /// Number of sub-window start positions in a block of `size` tuples.
    pub fn positions(&self, size: usize) -> u64 {
        if size < self.span {
            0
        } else {
            (size - self.span + 1) as u64
        }
    }
}

/// Deterministic work measure used in place of wall-clock time.
///
/// `window_evaluations` counts (candidate, start position) containment
/// decisions; `lookups` counts counts fetched from stored pattern sets.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct CostCounter {
    pub window_evaluations: u64,
    pub lookups: u64,
}

impl CostCounter {
    pub fn total(&self) -> u64 {
        self.window_evaluations + self.lookups
    }
}

impl Add for CostCounter {
    type Output = CostCounter;

    fn add(self, rhs: Self) -> Self {
        CostCounter {
            window_evaluations: self.window_evaluations + rhs.window_evaluations,
            lookups: self.lookups + rhs.lookups,
        }
    }
}

impl AddAssign for CostCounter {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for CostCounter {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(CostCounter::default(), Add::add)
    }
}

fn contains_in(seq: &Sequence, tuples: &[StreamTuple]) -> bool {
    let mut rest = tuples.iter();
    seq.items().iter().all(|&item| rest.any(|t| t.has(item)))
}

/// True iff the items of `seq` match strictly increasing tuple indices of `w`.
pub fn contains(seq: &Sequence, w: &ViewWindow<'_>) -> bool {
    contains_in(seq, w.tuples())
}

/// Number of width-`span` sub-windows of `w` that contain `seq`, by direct scan.
pub fn occur(seq: &Sequence, w: &ViewWindow<'_>, p: &CountParams) -> u64 {
    let tuples = w.tuples();
    if tuples.len() < p.span {
        return 0;
    }
    tuples
        .windows(p.span)
        .filter(|sub| contains_in(seq, sub))
        .count() as u64
}

/// Exact support `occur / |w|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Support {
    pub occur: u64,
    pub window_size: u64,
}

impl Support {
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.occur, self.window_size)
    }

    pub fn to_f64(&self) -> f64 {
        self.occur as f64 / self.window_size as f64
    }
}

pub fn support(seq: &Sequence, w: &ViewWindow<'_>, p: &CountParams) -> Result<Support> {
    if w.is_empty() {
        return Err(Error::EmptyWindow);
    }
    Ok(Support {
        occur: occur(seq, w, p),
        window_size: w.size() as u64,
    })
}

pub fn occur_partitioned(seq: &Sequence, blocks: &[ViewWindow<'_>], p: &CountParams) -> u64 {
    blocks.iter().map(|b| occur(seq, b, p)).sum()
}

/// Per-type sorted position lists for one block.
#[derive(Debug, Clone)]
pub struct BlockIndex {
    size: usize,
    positions: Vec<Vec<u32>>,
}

impl BlockIndex {
    pub fn new(w: &ViewWindow<'_>) -> Self {
        let mut positions = vec![Vec::new(); w.queue().alphabet().len()];
        for (i, t) in w.tuples().iter().enumerate() {
            for &ty in t.types() {
                positions[ty.index()].push(i as u32);
            }
        }
        Self {
            size: w.size(),
            positions,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Event types present in this block, in id order.
    pub fn present_types(&self) -> impl Iterator<Item = EventType> + '_ {
        self.positions
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_empty())
            .map(|(i, _)| EventType(i as u32))
    }

    fn list(&self, ty: EventType) -> &[u32] {
        self.positions.get(ty.index()).map_or(&[], Vec::as_slice)
    }

    /// Same value as [`occur`] on the indexed block.
    ///
    /// Every start in `(prev, p]`, where `p` is an occurrence of the first
    /// item and `prev` the one before it, greedily matches from `p` and so
    /// completes at the same earliest end `e`; such a start counts iff
    /// `e < start + span`.
    pub fn occur(&self, seq: &Sequence, span: usize) -> u64 {
        if self.size < span {
            return 0;
        }
        let last_start = (self.size - span) as i64;
        let firsts = self.list(seq.first());
        let mut total = 0u64;
        let mut prev: i64 = -1;
        for &p in firsts {
            let p = p as i64;
            if p - (span as i64) + 1 > last_start {
                break;
            }
            let Some(end) = self.greedy_end(seq, p as u32) else {
                break;
            };
            let lo = (prev + 1).max(end as i64 - span as i64 + 1).max(0);
            let hi = p.min(last_start);
            if hi >= lo {
                total += (hi - lo + 1) as u64;
            }
            prev = p;
        }
        total
    }

    fn greedy_end(&self, seq: &Sequence, first_pos: u32) -> Option<u32> {
        let mut cur = first_pos;
        for &item in &seq.items()[1..] {
            let list = self.list(item);
            let idx = list.partition_point(|&q| q <= cur);
            cur = *list.get(idx)?;
        }
        Some(cur)
    }
}

/// Indexed counter over a contiguous block list. Counts are per-block sums.
#[derive(Debug, Clone)]
pub struct BlockCounter {
    blocks: Vec<BlockIndex>,
    span: usize,
}

impl BlockCounter {
    pub fn new(blocks: &[ViewWindow<'_>], p: &CountParams) -> Self {
        Self {
            blocks: blocks.iter().map(BlockIndex::new).collect(),
            span: p.span(),
        }
    }

    pub fn window_size(&self) -> usize {
        self.blocks.iter().map(BlockIndex::size).sum()
    }

    pub fn blocks(&self) -> &[BlockIndex] {
        &self.blocks
    }

    /// Cost of counting one candidate over every block.
    pub fn unit_cost(&self) -> u64 {
        let p = CountParams { span: self.span };
        self.blocks.iter().map(|b| p.positions(b.size())).sum()
    }

    pub fn count(&self, seq: &Sequence) -> u64 {
        self.blocks.iter().map(|b| b.occur(seq, self.span)).sum()
    }

    pub fn present_types(&self) -> Vec<EventType> {
        let mut types: Vec<EventType> =
            self.blocks.iter().flat_map(|b| b.present_types()).collect();
        types.sort_unstable();
        types.dedup();
        types
    }
}

/// Largest alphabet [`brute_force_frequent`] will enumerate.
pub const ORACLE_MAX_TYPES: usize = 12;
/// Longest sequences [`brute_force_frequent`] will enumerate.
pub const ORACLE_MAX_LEN: usize = 6;
/// Largest total window [`brute_force_frequent`] will scan.
pub const ORACLE_MAX_TUPLES: usize = 5_000;

/// Exhaustive reference miner for tests.
///
/// Enumerates every sequence over the present alphabet up to `max_len`,
/// counts each with the direct scan, then classifies: frequent when the count
/// exceeds `min_supp * |W|`; border when the count lies in
/// `(min_nbd_supp * |W|, min_supp * |W|]` and every one-item deletion is
/// frequent. Extensions of a zero-count sequence are skipped since they
/// also count zero.
pub fn brute_force_frequent(
    blocks: &[ViewWindow<'_>],
    p: &CountParams,
    min_supp: Threshold,
    min_nbd_supp: Threshold,
    max_len: usize,
) -> Result<PatternSet> {
    let params = MiningParams::new(min_supp, min_nbd_supp, *p, Some(max_len))?;
    let total: usize = blocks.iter().map(ViewWindow::size).sum();
    if total > ORACLE_MAX_TUPLES {
        return Err(Error::OracleBound(format!(
            "{total} tuples > {ORACLE_MAX_TUPLES}"
        )));
    }
    if max_len > ORACLE_MAX_LEN {
        return Err(Error::OracleBound(format!(
            "max_len {max_len} > {ORACLE_MAX_LEN}"
        )));
    }
    let mut alphabet: Vec<EventType> = blocks
        .iter()
        .flat_map(|b| b.tuples().iter().flat_map(|t| t.types().iter().copied()))
        .collect();
    alphabet.sort_unstable();
    alphabet.dedup();
    if alphabet.len() > ORACLE_MAX_TYPES {
        return Err(Error::OracleBound(format!(
            "{} event types > {ORACLE_MAX_TYPES}",
            alphabet.len()
        )));
    }

    let mut counts: BTreeMap<Sequence, u64> = BTreeMap::new();
    let mut frontier: Vec<Sequence> = alphabet.iter().map(|&t| Sequence::single(t)).collect();
    let mut len = 1;
    while !frontier.is_empty() && len <= max_len {
        let mut next = Vec::new();
        for seq in frontier {
            let c = occur_partitioned(&seq, blocks, p);
            if c == 0 {
                continue;
            }
            if len < max_len {
                next.extend(alphabet.iter().map(|&t| seq.extended(t)));
            }
            counts.insert(seq, c);
        }
        frontier = next;
        len += 1;
    }

    let size = total as u64;
    let mut set = PatternSet::empty(
        params,
        size,
        blocks.iter().map(ViewWindow::block_id).collect(),
    );
    for (seq, &c) in &counts {
        if min_supp.exceeded_by(c, size) {
            set.frequent.insert(seq.clone(), c);
        }
    }
    for (seq, &c) in &counts {
        if !min_supp.exceeded_by(c, size)
            && min_nbd_supp.exceeded_by(c, size)
            && seq.deletions().all(|d| set.frequent.contains_key(&d))
        {
            set.border.insert(seq.clone(), c);
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream_model::{parse_event_log, StreamQueue};
    use proptest::prelude::*;

    fn seq(q: &StreamQueue, labels: &[&str]) -> Sequence {
        Sequence::from_labels(q.alphabet(), labels).unwrap()
    }

    fn span(n: usize) -> CountParams {
        CountParams::new(n).unwrap()
    }

    fn abab() -> StreamQueue {
        parse_event_log("1,a\n2,b\n3,a\n4,b\n9,c").unwrap()
    }

    #[test]
    fn contains_respects_order_and_distinct_tuples() {
        let q = parse_event_log("1,a\n2,b\n3,b\n4,a\n5,a\n5,b").unwrap();
        let ab = seq(&q, &["a", "b"]);
        assert!(contains(&ab, &q.window(0, 2).unwrap()));
        assert!(!contains(&ab, &q.window(2, 2).unwrap()));
        assert!(!contains(&ab, &q.window(4, 1).unwrap()));
    }

    #[test]
    fn occur_examples() {
        let q = abab();
        let w = q.window(0, 4).unwrap();
        assert_eq!(occur(&seq(&q, &["a", "b"]), &w, &span(2)), 2);
        assert_eq!(occur(&seq(&q, &["a"]), &w, &span(1)), 2);
        assert_eq!(occur(&seq(&q, &["c"]), &w, &span(2)), 0);
        assert_eq!(occur(&seq(&q, &["a"]), &w, &span(2)), 3);
        assert_eq!(occur(&seq(&q, &["a"]), &w, &span(5)), 0);
    }

    #[test]
    fn support_examples() {
        let q = abab();
        let w = q.window(0, 4).unwrap();
        let s = support(&seq(&q, &["a", "b"]), &w, &span(2)).unwrap();
        assert_eq!(s.ratio(), Ratio::new(1, 2));
        assert_eq!(s.to_f64(), 0.5);
        let zero = support(&seq(&q, &["c"]), &w, &span(2)).unwrap();
        assert_eq!(zero.occur, 0);
        assert!(matches!(
            support(&seq(&q, &["a"]), &q.window(0, 0).unwrap(), &span(1)),
            Err(Error::EmptyWindow)
        ));
    }

    #[test]
    fn partitioned_is_per_block_sum() {
        let q = abab();
        let ab = seq(&q, &["a", "b"]);
        let blocks = [q.window(0, 2).unwrap(), q.window(2, 2).unwrap()];
        assert_eq!(occur_partitioned(&ab, &blocks, &span(2)), 2);
        assert_eq!(occur_partitioned(&ab, &blocks[..1], &span(2)), 1);
        assert_eq!(occur_partitioned(&seq(&q, &["c"]), &blocks, &span(2)), 0);
        // b,a only occurs across the boundary
        assert_eq!(
            occur_partitioned(&seq(&q, &["b", "a"]), &blocks, &span(2)),
            0
        );
        assert_eq!(
            occur(&seq(&q, &["b", "a"]), &q.window(0, 4).unwrap(), &span(2)),
            1
        );
    }

    #[test]
    fn span_must_be_positive() {
        assert!(CountParams::new(0).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let q = abab();
        let blocks = [q.window(0, 4).unwrap()];
        let t = |s: &str| s.parse::<Threshold>().unwrap();

        // min_supp = 0.45: threshold 1.8, so <a,b>:2 is frequent.
        let set = brute_force_frequent(&blocks, &span(2), t("0.45"), t("0.2"), 3).unwrap();
        let freq: Vec<_> = set
            .frequent
            .iter()
            .map(|(s, &c)| (s.labels(q.alphabet()), c))
            .collect();
        let border: Vec<_> = set
            .border
            .iter()
            .map(|(s, &c)| (s.labels(q.alphabet()), c))
            .collect();
        assert_eq!(
            freq,
            vec![(vec!["a"], 3), (vec!["a", "b"], 2), (vec!["b"], 3)]
        );
        assert_eq!(border, vec![(vec!["b", "a"], 1)]);

        // min_supp = 0.5: threshold 2 exactly, strict comparison demotes <a,b>.
        let set = brute_force_frequent(&blocks, &span(2), t("0.5"), t("0.2"), 3).unwrap();
        let freq: Vec<_> = set
            .frequent
            .iter()
            .map(|(s, &c)| (s.labels(q.alphabet()), c))
            .collect();
        let border: Vec<_> = set
            .border
            .iter()
            .map(|(s, &c)| (s.labels(q.alphabet()), c))
            .collect();
        assert_eq!(freq, vec![(vec!["a"], 3), (vec!["b"], 3)]);
        assert_eq!(border, vec![(vec!["a", "b"], 2), (vec!["b", "a"], 1)]);
    }

    #[test]
    fn brute_force_empty_and_guards() {
        let q = abab();
        let t = |s: &str| s.parse::<Threshold>().unwrap();
        let empty =
            brute_force_frequent(&[q.window(0, 0).unwrap()], &span(2), t("0.5"), t("0.2"), 3)
                .unwrap();
        assert!(empty.frequent.is_empty() && empty.border.is_empty());

        let equal =
            brute_force_frequent(&[q.window(0, 4).unwrap()], &span(2), t("0.5"), t("0.5"), 3)
                .unwrap();
        assert!(equal.border.is_empty());

        assert!(matches!(
            brute_force_frequent(&[q.window(0, 4).unwrap()], &span(2), t("0.5"), t("0.2"), 9),
            Err(Error::OracleBound(_))
        ));
        let wide: String = (0..20).map(|i| format!("{i},t{i}\n")).collect();
        let wq = parse_event_log(&wide).unwrap();
        assert!(matches!(
            brute_force_frequent(&[wq.full_window()], &span(2), t("0.5"), t("0.2"), 2),
            Err(Error::OracleBound(_))
        ));
    }

    #[test]
    fn cost_counter_sums_associatively() {
        let a = CostCounter {
            window_evaluations: 3,
            lookups: 1,
        };
        let b = CostCounter {
            window_evaluations: 5,
            lookups: 0,
        };
        let c = CostCounter {
            window_evaluations: 0,
            lookups: 7,
        };
        assert_eq!((a + b) + c, a + (b + c));
        assert_eq!([a, b, c].into_iter().sum::<CostCounter>().total(), 16);
    }

    fn arb_stream() -> impl Strategy<Value = StreamQueue> {
        prop::collection::vec(prop::collection::vec(0u8..4, 1..3), 0..40).prop_map(|tuples| {
            let records: Vec<(i64, String)> = tuples
                .iter()
                .enumerate()
                .flat_map(|(i, types)| types.iter().map(move |t| (i as i64, format!("e{t}"))))
                .collect();
            StreamQueue::from_records(records).unwrap()
        })
    }

    fn arb_seq(max_len: usize) -> impl Strategy<Value = Vec<u8>> {
        prop::collection::vec(0u8..4, 1..=max_len)
    }

    fn to_seq(q: &StreamQueue, raw: &[u8]) -> Option<Sequence> {
        let items: Option<Vec<_>> = raw
            .iter()
            .map(|t| q.alphabet().get(&format!("e{t}")))
            .collect();
        items.map(|i| Sequence::new(i).unwrap())
    }

    proptest! {
        #[test]
        fn indexed_count_matches_scan(q in arb_stream(), raw in arb_seq(4), sp in 1usize..6) {
            if let Some(s) = to_seq(&q, &raw) {
                let w = q.full_window();
                let idx = BlockIndex::new(&w);
                prop_assert_eq!(idx.occur(&s, sp), occur(&s, &w, &span(sp)));
            }
        }

        #[test]
        fn anti_monotone_under_deletion(q in arb_stream(), raw in arb_seq(4), sp in 1usize..6) {
            if let Some(s) = to_seq(&q, &raw) {
                let w = q.full_window();
                let c = occur(&s, &w, &span(sp));
                for d in s.deletions() {
                    prop_assert!(occur(&d, &w, &span(sp)) >= c);
                }
                prop_assert!(c <= span(sp).positions(w.size()));
            }
        }

        #[test]
        fn partition_loss_bounded(q in arb_stream(), raw in arb_seq(3), sp in 1usize..5, cut_frac in 0.0f64..1.0) {
            if let Some(s) = to_seq(&q, &raw) {
                let n = q.len();
                let cut = (cut_frac * n as f64) as usize;
                let blocks = [q.window(0, cut).unwrap(), q.window(cut, n - cut).unwrap()];
                let parts = occur_partitioned(&s, &blocks, &span(sp));
                let whole = occur(&s, &q.full_window(), &span(sp));
                prop_assert!(parts <= whole + (sp as u64 - 1));
                prop_assert!(parts <= whole);
            }
        }
    }
}
