//! Plain-text persistence for pattern sets.
//!
//! ```text
//! # streamseq patterns v1
//! window_size=4
//! min_supp=9/20
//! min_nbd_supp=1/5
//! span=2
//! max_len=none
//! blocks=0..4
//! L a 3
//! L a b 2
//! NBD b a 1
//! ```
//!
//! Entries are tab-separated: section tag, event labels, occurrence count.
//! Within each section they are sorted by label sequence.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::miner::{MiningParams, PatternSet, Threshold};
use crate::occurrence::CountParams;
use crate::stream_model::{Alphabet, BlockId, EventType, Sequence};

pub const MAGIC: &str = "# streamseq patterns v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Section {
    Frequent,
    Border,
}

impl Section {
    fn tag(self) -> &'static str {
        match self {
            Section::Frequent => "L",
            Section::Border => "NBD",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub section: Section,
    pub labels: Vec<String>,
    pub count: u64,
}

/// Label-level form of a [`PatternSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternFile {
    pub params: MiningParams,
    pub window_size: u64,
    pub blocks: Vec<BlockId>,
    pub entries: Vec<Entry>,
}

impl PatternFile {
    pub fn from_pattern_set(set: &PatternSet, alphabet: &Alphabet) -> Self {
        let mut entries: Vec<Entry> = [
            (Section::Frequent, &set.frequent),
            (Section::Border, &set.border),
        ]
        .into_iter()
        .flat_map(|(section, map)| {
            map.iter().map(move |(s, &count)| Entry {
                section,
                labels: s.labels(alphabet).into_iter().map(str::to_owned).collect(),
                count,
            })
        })
        .collect();
        sort_entries(&mut entries);
        Self {
            params: set.params,
            window_size: set.window_size,
            blocks: set.blocks.clone(),
            entries,
        }
    }

    /// Resolves labels against `alphabet`, interning unknown ones.
    pub fn to_pattern_set_interning(&self, alphabet: &mut Alphabet) -> Result<PatternSet> {
        self.build(|label| alphabet.intern(label))
    }

    /// Resolves labels against a fixed alphabet; unknown labels are an error.
    pub fn to_pattern_set(&self, alphabet: &Alphabet) -> Result<PatternSet> {
        self.build(|label| {
            alphabet.get(label).ok_or_else(|| {
                Error::Contract(format!("label {label:?} does not occur in the log"))
            })
        })
    }

    fn build(&self, mut resolve: impl FnMut(&str) -> Result<EventType>) -> Result<PatternSet> {
        let mut set = PatternSet::empty(self.params, self.window_size, self.blocks.clone());
        for e in &self.entries {
            let items = e
                .labels
                .iter()
                .map(|l| resolve(l))
                .collect::<Result<Vec<_>>>()?;
            let seq = Sequence::new(items)?;
            let map = match e.section {
                Section::Frequent => &mut set.frequent,
                Section::Border => &mut set.border,
            };
            if map.insert(seq, e.count).is_some() {
                return Err(Error::Contract(format!("duplicate entry {:?}", e.labels)));
            }
        }
        set.validate()?;
        Ok(set)
    }

    /// Lines of one section, as written.
    pub fn section_text(&self, section: Section) -> String {
        let mut out = String::new();
        for e in self.entries.iter().filter(|e| e.section == section) {
            write_entry(&mut out, e);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, l)) if l == MAGIC => {}
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("missing `{MAGIC}` header"),
                })
            }
        }

        let mut header: Vec<(usize, &str, &str)> = Vec::new();
        let mut entries = Vec::new();
        for (no, line) in lines {
            if line.is_empty() {
                continue;
            }
            if line.starts_with("L\t") || line.starts_with("NBD\t") {
                entries.push(parse_entry(no, line)?);
                continue;
            }
            if !entries.is_empty() {
                return Err(Error::Parse {
                    line: no,
                    msg: "header line after entries".into(),
                });
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: no,
                msg: format!("expected `key=value` or an entry, got {line:?}"),
            })?;
            header.push((no, k, v));
        }

        let get = |key: &str| -> Result<(usize, &str)> {
            header
                .iter()
                .find(|(_, k, _)| *k == key)
                .map(|&(no, _, v)| (no, v))
                .ok_or_else(|| Error::Parse {
                    line: 1,
                    msg: format!("header is missing `{key}`"),
                })
        };
        let parse_err = |line: usize, e: Error| Error::Parse {
            line,
            msg: e.to_string(),
        };

        let (no, v) = get("window_size")?;
        let window_size: u64 = v.parse().map_err(|_| Error::Parse {
            line: no,
            msg: format!("bad window_size {v:?}"),
        })?;
        let (no, v) = get("min_supp")?;
        let min_supp: Threshold = v.parse().map_err(|e| parse_err(no, e))?;
        let (no, v) = get("min_nbd_supp")?;
        let min_nbd_supp: Threshold = v.parse().map_err(|e| parse_err(no, e))?;
        let (no, v) = get("span")?;
        let span = v
            .parse::<usize>()
            .map_err(|_| Error::Parse {
                line: no,
                msg: format!("bad span {v:?}"),
            })
            .and_then(|s| CountParams::new(s).map_err(|e| parse_err(no, e)))?;
        let (no, v) = get("max_len")?;
        let max_len = if v == "none" {
            None
        } else {
            Some(v.parse::<usize>().map_err(|_| Error::Parse {
                line: no,
                msg: format!("bad max_len {v:?}"),
            })?)
        };
        let (no, v) = get("blocks")?;
        let blocks = parse_blocks(v).ok_or_else(|| Error::Parse {
            line: no,
            msg: format!("bad blocks {v:?}"),
        })?;
        let params = MiningParams::new(min_supp, min_nbd_supp, span, max_len)
            .map_err(|e| parse_err(1, e))?;

        let mut file = Self {
            params,
            window_size,
            blocks,
            entries,
        };
        sort_entries(&mut file.entries);
        Ok(file)
    }
}

impl std::fmt::Display for PatternFile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let p = &self.params;
        let mut out = String::new();
        writeln!(out, "{MAGIC}")?;
        writeln!(out, "window_size={}", self.window_size)?;
        writeln!(out, "min_supp={}", p.min_supp)?;
        writeln!(out, "min_nbd_supp={}", p.min_nbd_supp)?;
        writeln!(out, "span={}", p.span())?;
        match p.max_len {
            Some(m) => writeln!(out, "max_len={m}")?,
            None => writeln!(out, "max_len=none")?,
        }
        let blocks: Vec<String> = self.blocks.iter().map(BlockId::to_string).collect();
        writeln!(out, "blocks={}", blocks.join(","))?;
        for e in &self.entries {
            write_entry(&mut out, e);
        }
        f.write_str(&out)
    }
}

fn sort_entries(entries: &mut [Entry]) {
    entries.sort_by(|a, b| (a.section, &a.labels).cmp(&(b.section, &b.labels)));
}

fn write_entry(out: &mut String, e: &Entry) {
    out.push_str(e.section.tag());
    for l in &e.labels {
        out.push('\t');
        out.push_str(l);
    }
    let _ = writeln!(out, "\t{}", e.count);
}

fn parse_entry(no: usize, line: &str) -> Result<Entry> {
    let fields: Vec<&str> = line.split('\t').collect();
    let bad = |msg: String| Error::Parse { line: no, msg };
    if fields.len() < 3 {
        return Err(bad(
            "entry needs a tag, at least one label and a count".into()
        ));
    }
    let section = match fields[0] {
        "L" => Section::Frequent,
        "NBD" => Section::Border,
        other => return Err(bad(format!("unknown section {other:?}"))),
    };
    let count_str = fields[fields.len() - 1];
    let count: u64 = count_str
        .parse()
        .map_err(|_| bad(format!("count {count_str:?} is not a non-negative integer")))?;
    let labels: Vec<String> = fields[1..fields.len() - 1]
        .iter()
        .map(|s| s.to_string())
        .collect();
    if labels.iter().any(|l| l.is_empty() || l.contains(',')) {
        return Err(bad("entry has an invalid label".into()));
    }
    Ok(Entry {
        section,
        labels,
        count,
    })
}

fn parse_blocks(v: &str) -> Option<Vec<BlockId>> {
    if v.is_empty() {
        return Some(Vec::new());
    }
    v.split(',')
        .map(|b| {
            let (s, e) = b.split_once("..")?;
            let start: usize = s.parse().ok()?;
            let end: usize = e.parse().ok()?;
            (end >= start).then(|| BlockId {
                start,
                size: end - start,
            })
        })
        .collect()
}
