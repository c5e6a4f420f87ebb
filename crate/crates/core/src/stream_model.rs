//! Event streams: interned event types, timestamped tuples, queues and
//! contiguous viewing windows over them.
//!
//! A [`StreamQueue`] is immutable once built. Windows are index ranges that
//! borrow the queue, so slicing the same queue many times costs nothing.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Interned event type. Ids are only meaningful relative to an [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventType(pub u32);

impl EventType {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Injective label <-> id table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    labels: Vec<String>,
    ids: HashMap<String, EventType>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds an alphabet whose ids follow the sorted order of the labels.
    pub fn from_sorted_labels<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = labels.into_iter().map(Into::into).collect();
        let mut alphabet = Self::new();
        for label in set {
            alphabet.intern(&label)?;
        }
        Ok(alphabet)
    }

    pub fn intern(&mut self, label: &str) -> Result<EventType> {
        validate_label(label)?;
        if let Some(&id) = self.ids.get(label) {
            return Ok(id);
        }
        let id = EventType(self.labels.len() as u32);
        self.labels.push(label.to_owned());
        self.ids.insert(label.to_owned(), id);
        Ok(id)
    }

    pub fn get(&self, label: &str) -> Option<EventType> {
        self.ids.get(label).copied()
    }

    pub fn label(&self, id: EventType) -> &str {
        &self.labels[id.index()]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }
}

fn validate_label(label: &str) -> Result<()> {
    if label.is_empty() {
        return Err(Error::Param("event label must be non-empty".into()));
    }
    if label.contains([',', '\t', '\n', '\r']) {
        return Err(Error::Param(format!(
            "event label {label:?} contains a separator character"
        )));
    }
    Ok(())
}

/// Event types that occur together at one timestamp.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamTuple {
    time: i64,
    types: Vec<EventType>,
}

impl StreamTuple {
    /// `types` is sorted and deduplicated; it must not end up empty.
    pub fn new(time: i64, mut types: Vec<EventType>) -> Result<Self> {
        types.sort_unstable();
        types.dedup();
        if types.is_empty() {
            return Err(Error::Contract(format!(
                "tuple at t={time} has no event types"
            )));
        }
        Ok(Self { time, types })
    }

    pub fn time(&self) -> i64 {
        self.time
    }

    pub fn types(&self) -> &[EventType] {
        &self.types
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn has(&self, ty: EventType) -> bool {
        self.types.binary_search(&ty).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamQueue {
    alphabet: Arc<Alphabet>,
    tuples: Vec<StreamTuple>,
}

impl StreamQueue {
    pub fn empty() -> Self {
        Self {
            alphabet: Arc::new(Alphabet::new()),
            tuples: Vec::new(),
        }
    }

    pub fn new(alphabet: Arc<Alphabet>, tuples: Vec<StreamTuple>) -> Result<Self> {
        for pair in tuples.windows(2) {
            if pair[0].time >= pair[1].time {
                return Err(Error::Contract(format!(
                    "timestamps must strictly increase ({} then {})",
                    pair[0].time, pair[1].time
                )));
            }
        }
        let n = alphabet.len();
        if let Some(bad) = tuples
            .iter()
            .flat_map(|t| t.types())
            .find(|ty| ty.index() >= n)
        {
            return Err(Error::Contract(format!(
                "event type id {} not in alphabet",
                bad.0
            )));
        }
        Ok(Self { alphabet, tuples })
    }

    /// Groups `(timestamp, label)` records into tuples. Records are stably
    /// sorted by timestamp first; ids follow sorted label order.
    pub fn from_records<I, S>(records: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, S)>,
        S: AsRef<str>,
    {
        let mut records: Vec<(i64, S)> = records.into_iter().collect();
        records.sort_by_key(|r| r.0);
        let alphabet =
            Alphabet::from_sorted_labels(records.iter().map(|(_, l)| l.as_ref().to_owned()))?;

        let mut tuples = Vec::new();
        let mut i = 0;
        while i < records.len() {
            let time = records[i].0;
            let mut types = Vec::new();
            while i < records.len() && records[i].0 == time {
                types.push(alphabet.get(records[i].1.as_ref()).expect("interned above"));
                i += 1;
            }
            tuples.push(StreamTuple::new(time, types)?);
        }
        Self::new(Arc::new(alphabet), tuples)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn tuples(&self) -> &[StreamTuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Total number of events (sum of tuple lengths).
    pub fn event_count(&self) -> usize {
        self.tuples.iter().map(StreamTuple::len).sum()
    }

    pub fn window(&self, start: usize, size: usize) -> Result<ViewWindow<'_>> {
        window(self, start, size)
    }

    pub fn full_window(&self) -> ViewWindow<'_> {
        ViewWindow {
            queue: self,
            start: 0,
            size: self.len(),
        }
    }

    /// Serializes to the `timestamp,label` log format, one record per event,
    /// events within a tuple in id order.
    pub fn to_event_log(&self) -> String {
        let mut out = String::new();
        for tuple in &self.tuples {
            for &ty in tuple.types() {
                out.push_str(&tuple.time.to_string());
                out.push(',');
                out.push_str(self.alphabet.label(ty));
                out.push('\n');
            }
        }
        out
    }
}

/// Parses the `timestamp,event_label` log format. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_event_log(text: &str) -> Result<StreamQueue> {
    let mut records = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (ts, label) = line.split_once(',').ok_or_else(|| Error::Parse {
            line: line_no,
            msg: "expected `timestamp,event_label`".into(),
        })?;
        let time: i64 = ts.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("timestamp {ts:?} is not an integer"),
        })?;
        let label = label.trim();
        if label.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                msg: "empty event label".into(),
            });
        }
        if label.contains(',') {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("event label {label:?} contains a comma"),
            });
        }
        records.push((time, label.to_owned()));
    }
    StreamQueue::from_records(records).map_err(|e| match e {
        Error::Param(msg) => Error::Parse { line: 0, msg },
        other => other,
    })
}

/// Contiguous run of tuples `[start, start + size)` of a queue.
#[derive(Debug, Clone, Copy)]
pub struct ViewWindow<'q> {
    queue: &'q StreamQueue,
    start: usize,
    size: usize,
}

impl PartialEq for ViewWindow<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.queue, other.queue)
            && self.start == other.start
            && self.size == other.size
    }
}

impl<'q> ViewWindow<'q> {
    pub fn queue(&self) -> &'q StreamQueue {
        self.queue
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn end(&self) -> usize {
        self.start + self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn range(&self) -> Range<usize> {
        self.start..self.end()
    }

    pub fn tuples(&self) -> &'q [StreamTuple] {
        &self.queue.tuples[self.range()]
    }

    /// Sub-window relative to this window's start.
    pub fn sub(&self, offset: usize, size: usize) -> Result<ViewWindow<'q>> {
        if offset + size > self.size {
            return Err(Error::Bounds {
                start: self.start + offset,
                end: self.start + offset + size,
                len: self.end(),
            });
        }
        Ok(ViewWindow {
            queue: self.queue,
            start: self.start + offset,
            size,
        })
    }

    pub fn block_id(&self) -> BlockId {
        BlockId {
            start: self.start,
            size: self.size,
        }
    }
}

pub fn window(queue: &StreamQueue, start: usize, size: usize) -> Result<ViewWindow<'_>> {
    if start.checked_add(size).is_none_or(|end| end > queue.len()) {
        return Err(Error::Bounds {
            start,
            end: start.saturating_add(size),
            len: queue.len(),
        });
    }
    Ok(ViewWindow { queue, start, size })
}

/// Splits off the next `delta` tuples after `w`: returns `(ΔW, W ∪ ΔW)`.
pub fn extend<'q>(w: ViewWindow<'q>, delta: usize) -> Result<(ViewWindow<'q>, ViewWindow<'q>)> {
    let increment = window(w.queue, w.end(), delta)?;
    let grown = ViewWindow {
        queue: w.queue,
        start: w.start,
        size: w.size + delta,
    };
    Ok((increment, grown))
}

/// Index range of a block, recorded in pattern sets so that later updates
/// can rescan the same tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockId {
    pub start: usize,
    pub size: usize,
}

impl BlockId {
    pub fn end(&self) -> usize {
        self.start + self.size
    }
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end())
    }
}

/// `W_0` followed by contiguous increments `ΔW_1, ΔW_2, ...`.
#[derive(Debug, Clone)]
pub struct WindowPartition<'q> {
    initial: ViewWindow<'q>,
    increments: Vec<ViewWindow<'q>>,
}

impl<'q> WindowPartition<'q> {
    pub fn new(initial: ViewWindow<'q>) -> Self {
        Self {
            initial,
            increments: Vec::new(),
        }
    }

    pub fn initial(&self) -> ViewWindow<'q> {
        self.initial
    }

    pub fn increments(&self) -> &[ViewWindow<'q>] {
        &self.increments
    }

    /// The window covering every block so far.
    pub fn covering(&self) -> ViewWindow<'q> {
        let size = self.initial.size + self.increments.iter().map(|w| w.size).sum::<usize>();
        ViewWindow {
            queue: self.initial.queue,
            start: self.initial.start,
            size,
        }
    }

    /// Appends the next `delta` tuples as a new increment and returns it.
    pub fn push(&mut self, delta: usize) -> Result<ViewWindow<'q>> {
        let (increment, _) = extend(self.covering(), delta)?;
        self.increments.push(increment);
        Ok(increment)
    }

    pub fn blocks(&self) -> Vec<ViewWindow<'q>> {
        std::iter::once(self.initial)
            .chain(self.increments.iter().copied())
            .collect()
    }
}

/// Checks that `blocks` are contiguous and non-overlapping over one queue.
pub fn check_contiguous(blocks: &[ViewWindow<'_>]) -> Result<()> {
    for pair in blocks.windows(2) {
        if !std::ptr::eq(pair[0].queue, pair[1].queue) {
            return Err(Error::Contract("blocks belong to different queues".into()));
        }
        if pair[0].end() != pair[1].start {
            return Err(Error::Contract(format!(
                "blocks are not contiguous: {} then {}",
                pair[0].block_id(),
                pair[1].block_id()
            )));
        }
    }
    Ok(())
}

/// Non-empty ordered list of event types; repeats allowed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequence(Vec<EventType>);

impl Sequence {
    pub fn new(items: Vec<EventType>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Contract(
                "sequence must have at least one item".into(),
            ));
        }
        Ok(Self(items))
    }

    pub fn single(item: EventType) -> Self {
        Self(vec![item])
    }

    pub fn from_labels(alphabet: &Alphabet, labels: &[&str]) -> Result<Self> {
        let items = labels
            .iter()
            .map(|l| {
                alphabet
                    .get(l)
                    .ok_or_else(|| Error::Param(format!("unknown event label {l:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(items)
    }

    pub fn items(&self) -> &[EventType] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> EventType {
        self.0[0]
    }

    pub fn last(&self) -> EventType {
        self.0[self.0.len() - 1]
    }

    /// New sequence with this one's items followed by `item`.
    pub fn extended(&self, item: EventType) -> Self {
        let mut items = self.0.clone();
        items.push(item);
        Self(items)
    }

    /// The length-(m-1) subsequences obtained by deleting one item each.
    /// Empty for 1-sequences.
    pub fn deletions(&self) -> impl Iterator<Item = Sequence> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |skip| {
            Sequence(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &t)| t)
                    .collect(),
            )
        })
    }

    /// Order-preserving subsequence test.
    pub fn is_subsequence_of(&self, other: &Sequence) -> bool {
        let mut it = other.0.iter();
        self.0.iter().all(|x| it.any(|y| y == x))
    }

    pub fn labels<'a>(&'a self, alphabet: &'a Alphabet) -> Vec<&'a str> {
        self.0.iter().map(|&t| alphabet.label(t)).collect()
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> String {
        format!("<{}>", self.labels(alphabet).join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(text: &str) -> StreamQueue {
        parse_event_log(text).unwrap()
    }

    fn tuple_labels(queue: &StreamQueue) -> Vec<(i64, Vec<&str>)> {
        queue
            .tuples()
            .iter()
            .map(|t| {
                (
                    t.time(),
                    t.types()
                        .iter()
                        .map(|&ty| queue.alphabet().label(ty))
                        .collect(),
                )
            })
            .collect()
    }

    #[test]
    fn groups_by_timestamp() {
        let queue = q("1,a\n1,b\n2,c");
        assert_eq!(
            tuple_labels(&queue),
            vec![(1, vec!["a", "b"]), (2, vec!["c"])]
        );
        assert_eq!(queue.tuples()[0].len(), 2);
    }

    #[test]
    fn empty_input() {
        assert!(q("").is_empty());
        assert!(q("# only a comment\n\n").is_empty());
    }

    #[test]
    fn sorts_records() {
        let queue = q("2,c\n1,a");
        assert_eq!(tuple_labels(&queue), vec![(1, vec!["a"]), (2, vec!["c"])]);
    }

    #[test]
    fn duplicate_labels_merge() {
        let queue = q("5,x\n5,x\n5,y");
        assert_eq!(tuple_labels(&queue), vec![(5, vec!["x", "y"])]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        for (text, line) in [
            ("1,a\nbad", 2),
            ("1,a\n# c\nx,b", 3),
            ("1,", 1),
            ("1,a\n2,  ", 2),
        ] {
            match parse_event_log(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
        assert!(matches!(
            parse_event_log("1,a,b"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn window_bounds() {
        let queue = q("1,a\n2,b\n3,c\n4,d\n5,e\n6,f\n7,g\n8,h");
        let w = queue.window(0, 7).unwrap();
        assert_eq!(w.size(), 7);
        assert_eq!(queue.window(3, 0).unwrap().size(), 0);
        let short = q("1,a\n2,b\n3,c\n4,d");
        assert!(matches!(short.window(3, 2), Err(Error::Bounds { .. })));
    }

    #[test]
    fn extend_splits_next_block() {
        let records: Vec<(i64, String)> = (0..22_000).map(|i| (i, format!("e{}", i % 7))).collect();
        let queue = StreamQueue::from_records(records).unwrap();
        let w = queue.window(0, 20_000).unwrap();
        let (delta, grown) = extend(w, 2_000).unwrap();
        assert_eq!(delta.range(), 20_000..22_000);
        assert_eq!(grown.range(), 0..22_000);

        let (delta, grown) = extend(w, 0).unwrap();
        assert!(delta.is_empty());
        assert_eq!(grown, w);

        let all = queue.full_window();
        assert!(matches!(extend(all, 1), Err(Error::Bounds { .. })));
    }

    #[test]
    fn partition_concatenates_to_covering_window() {
        let records: Vec<(i64, String)> = (0..50).map(|i| (i, format!("e{}", i % 3))).collect();
        let queue = StreamQueue::from_records(records).unwrap();
        let mut part = WindowPartition::new(queue.window(5, 10).unwrap());
        part.push(7).unwrap();
        part.push(0).unwrap();
        part.push(13).unwrap();
        let blocks = part.blocks();
        check_contiguous(&blocks).unwrap();
        let joined: Vec<_> = blocks
            .iter()
            .flat_map(|b| b.tuples().iter().cloned())
            .collect();
        assert_eq!(joined.as_slice(), part.covering().tuples());
        assert_eq!(part.covering().range(), 5..35);
        assert!(part.push(100).is_err());
    }

    #[test]
    fn sequence_deletions_and_subsequence() {
        let s = Sequence::new(vec![EventType(0), EventType(1), EventType(2)]).unwrap();
        let dels: Vec<_> = s.deletions().map(|d| d.items().to_vec()).collect();
        assert_eq!(
            dels,
            vec![
                vec![EventType(1), EventType(2)],
                vec![EventType(0), EventType(2)],
                vec![EventType(0), EventType(1)],
            ]
        );
        assert_eq!(Sequence::single(EventType(3)).deletions().count(), 0);
        let sub = Sequence::new(vec![EventType(0), EventType(2)]).unwrap();
        assert!(sub.is_subsequence_of(&s));
        let rev = Sequence::new(vec![EventType(2), EventType(0)]).unwrap();
        assert!(!rev.is_subsequence_of(&s));
        assert!(Sequence::new(vec![]).is_err());
    }

    #[test]
    fn sequence_order_is_lexicographic() {
        let a = Sequence::single(EventType(0));
        let ab = Sequence::new(vec![EventType(0), EventType(1)]).unwrap();
        let b = Sequence::single(EventType(1));
        assert!(a < ab && ab < b);
    }

    #[test]
    fn alphabet_rejects_bad_labels() {
        let mut alpha = Alphabet::new();
        assert!(alpha.intern("").is_err());
        assert!(alpha.intern("a,b").is_err());
        let x = alpha.intern("x").unwrap();
        assert_eq!(alpha.intern("x").unwrap(), x);
        assert_ne!(alpha.intern("y").unwrap(), x);
    }
}
