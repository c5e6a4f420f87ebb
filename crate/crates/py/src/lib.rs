//! Python bindings: event logs, mining, incremental update, distance and
//! the update-timing sweep.

use std::sync::Arc;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use streamseq::diffmetric::{self, PatternKeySet};
use streamseq::generator::{self, EmbeddedPattern, GenConfig};
use streamseq::ius::{self, UpdateInput};
use streamseq::miner::{self, Threshold};
use streamseq::occurrence::CountParams;
use streamseq::pattern_file::PatternFile;
use streamseq::stream_model::{self, Alphabet, StreamQueue, ViewWindow};
use streamseq::tpd::{self, Curve, SweepConfig, TimingMode};
use streamseq::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

trait OrPyErr<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPyErr<T> for streamseq::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// A parsed event log: tuples of event labels with increasing timestamps.
#[pyclass(frozen, module = "streamseq")]
pub struct EventLog {
    queue: StreamQueue,
}

#[pymethods]
impl EventLog {
    /// Parses `timestamp,label` lines.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            queue: stream_model::parse_event_log(text).py()?,
        })
    }

    #[staticmethod]
    fn from_records(records: Vec<(i64, String)>) -> PyResult<Self> {
        Ok(Self {
            queue: StreamQueue::from_records(records).py()?,
        })
    }

    fn __len__(&self) -> usize {
        self.queue.len()
    }

    #[getter]
    fn event_count(&self) -> usize {
        self.queue.event_count()
    }

    fn labels(&self) -> Vec<String> {
        self.queue.alphabet().labels().map(str::to_owned).collect()
    }

    /// Tuples as `(timestamp, [labels])`.
    fn tuples(&self) -> Vec<(i64, Vec<String>)> {
        let alpha = self.queue.alphabet();
        self.queue
            .tuples()
            .iter()
            .map(|t| {
                (
                    t.time(),
                    t.types()
                        .iter()
                        .map(|&ty| alpha.label(ty).to_owned())
                        .collect(),
                )
            })
            .collect()
    }

    fn to_text(&self) -> String {
        self.queue.to_event_log()
    }

    fn __repr__(&self) -> String {
        format!(
            "EventLog(tuples={}, events={}, types={})",
            self.queue.len(),
            self.queue.event_count(),
            self.queue.alphabet().len()
        )
    }
}

/// Mining thresholds. Supports are given as decimal (`"0.04"`) or fraction
/// (`"1/25"`) strings, or floats.
#[pyclass(
    frozen,
    skip_from_py_object,
    module = "streamseq",
    name = "MiningParams"
)]
#[derive(Clone, Copy)]
pub struct PyMiningParams {
    inner: miner::MiningParams,
}

fn threshold(value: &Bound<'_, PyAny>) -> PyResult<Threshold> {
    let text = match value.extract::<String>() {
        Ok(s) => s,
        Err(_) => value.extract::<f64>()?.to_string(),
    };
    text.parse().py()
}

#[pymethods]
impl PyMiningParams {
    #[new]
    #[pyo3(signature = (min_supp, min_nbd_supp, span, max_len = None))]
    fn new(
        min_supp: &Bound<'_, PyAny>,
        min_nbd_supp: &Bound<'_, PyAny>,
        span: usize,
        max_len: Option<usize>,
    ) -> PyResult<Self> {
        Ok(Self {
            inner: miner::MiningParams::new(
                threshold(min_supp)?,
                threshold(min_nbd_supp)?,
                CountParams::new(span).py()?,
                max_len,
            )
            .py()?,
        })
    }

    #[getter]
    fn min_supp(&self) -> String {
        self.inner.min_supp.to_string()
    }

    #[getter]
    fn min_nbd_supp(&self) -> String {
        self.inner.min_nbd_supp.to_string()
    }

    #[getter]
    fn span(&self) -> usize {
        self.inner.span()
    }

    #[getter]
    fn max_len(&self) -> Option<usize> {
        self.inner.max_len
    }

    fn __repr__(&self) -> String {
        format!(
            "MiningParams(min_supp={}, min_nbd_supp={}, span={}, max_len={:?})",
            self.inner.min_supp,
            self.inner.min_nbd_supp,
            self.inner.span(),
            self.inner.max_len
        )
    }
}

type Entries = Vec<(Vec<String>, u64)>;

/// Frequent sequences and negative border of a window, with counts.
#[pyclass(frozen, module = "streamseq", name = "PatternSet")]
pub struct PyPatternSet {
    inner: miner::PatternSet,
    alphabet: Arc<Alphabet>,
}

impl PyPatternSet {
    fn entries(&self, map: &std::collections::BTreeMap<stream_model::Sequence, u64>) -> Entries {
        map.iter()
            .map(|(s, &c)| {
                (
                    s.labels(&self.alphabet)
                        .into_iter()
                        .map(str::to_owned)
                        .collect(),
                    c,
                )
            })
            .collect()
    }

    fn file(&self) -> PatternFile {
        PatternFile::from_pattern_set(&self.inner, &self.alphabet)
    }
}

#[pymethods]
impl PyPatternSet {
    /// Reads the pattern-file text, resolving labels against `log`.
    #[staticmethod]
    fn parse(text: &str, log: &EventLog) -> PyResult<Self> {
        let file = PatternFile::parse(text).py()?;
        let alphabet = log.queue.alphabet().clone();
        Ok(Self {
            inner: file.to_pattern_set(&alphabet).py()?,
            alphabet,
        })
    }

    /// `[(labels, count)]`, sorted by sequence.
    #[getter]
    fn frequent(&self) -> Entries {
        self.entries(&self.inner.frequent)
    }

    #[getter]
    fn border(&self) -> Entries {
        self.entries(&self.inner.border)
    }

    #[getter]
    fn window_size(&self) -> u64 {
        self.inner.window_size
    }

    /// Block ranges as `(start, end)` tuple indices.
    #[getter]
    fn blocks(&self) -> Vec<(usize, usize)> {
        self.inner
            .blocks
            .iter()
            .map(|b| (b.start, b.end()))
            .collect()
    }

    #[getter]
    fn params(&self) -> PyMiningParams {
        PyMiningParams {
            inner: self.inner.params,
        }
    }

    fn to_text(&self) -> String {
        self.file().to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "PatternSet(window_size={}, frequent={}, border={})",
            self.inner.window_size,
            self.inner.frequent.len(),
            self.inner.border.len()
        )
    }
}

fn blocks_of<'q>(log: &'q EventLog, set: &PyPatternSet) -> PyResult<Vec<ViewWindow<'q>>> {
    if *set.alphabet != **log.queue.alphabet() {
        return Err(PyValueError::new_err(
            "pattern set was not mined from this log",
        ));
    }
    set.inner
        .blocks
        .iter()
        .map(|b| log.queue.window(b.start, b.size).py())
        .collect()
}

/// Mines consecutive blocks of `sizes` tuples starting at `start`.
#[pyfunction]
#[pyo3(signature = (log, params, sizes, start = 0))]
fn mine(
    log: &EventLog,
    params: &PyMiningParams,
    sizes: Vec<usize>,
    start: usize,
) -> PyResult<PyPatternSet> {
    let mut at = start;
    let mut blocks = Vec::with_capacity(sizes.len());
    for size in sizes {
        blocks.push(log.queue.window(at, size).py()?);
        at += size;
    }
    Ok(PyPatternSet {
        inner: miner::mine(&blocks, &params.inner).py()?,
        alphabet: log.queue.alphabet().clone(),
    })
}

/// Combines the pattern sets of two adjacent windows of `log`. Returns the
/// updated set and a dict of work counters.
#[pyfunction]
fn ius_update(
    log: &EventLog,
    old: &PyPatternSet,
    delta: &PyPatternSet,
) -> PyResult<(PyPatternSet, std::collections::BTreeMap<&'static str, u64>)> {
    let old_blocks = blocks_of(log, old)?;
    let delta_blocks = blocks_of(log, delta)?;
    let (inner, stats) = ius::ius_update_with_stats(&UpdateInput {
        old: &old.inner,
        delta: &delta.inner,
        old_blocks: &old_blocks,
        delta_blocks: &delta_blocks,
        params: old.inner.params,
    })
    .py()?;
    let counters = [
        ("window_evaluations", stats.cost.window_evaluations),
        ("lookups", stats.cost.lookups),
        ("rescans_old", stats.rescans_old),
        ("rescans_delta", stats.rescans_delta),
    ]
    .into_iter()
    .collect();
    Ok((
        PyPatternSet {
            inner,
            alphabet: log.queue.alphabet().clone(),
        },
        counters,
    ))
}

/// `(sym_diff, union, value)` between the frequent sections, or frequent
/// plus border when `with_border` is set.
#[pyfunction]
#[pyo3(signature = (a, b, with_border = false))]
fn distance(
    a: &PyPatternSet,
    b: &PyPatternSet,
    with_border: bool,
) -> PyResult<(usize, usize, f64)> {
    if a.alphabet != b.alphabet {
        return Err(PyValueError::new_err(
            "pattern sets come from different logs",
        ));
    }
    let keys = |s: &PyPatternSet| {
        if with_border {
            PatternKeySet::with_border(&s.inner)
        } else {
            PatternKeySet::frequent(&s.inner)
        }
    };
    let d = diffmetric::distance(&keys(a), &keys(b));
    Ok((d.sym_diff, d.union, d.to_f64()))
}

#[pyfunction]
#[pyo3(signature = (values, new_min = 0.0, new_max = 1.0))]
fn min_max_normalize(values: Vec<f64>, new_min: f64, new_max: f64) -> PyResult<Vec<f64>> {
    tpd::min_max_normalize(&values, new_min, new_max).py()
}

/// Crossings of two piecewise-linear curves sampled on the same `xs`.
#[pyfunction]
fn find_intersections(xs: Vec<f64>, ys_a: Vec<f64>, ys_b: Vec<f64>) -> PyResult<Vec<f64>> {
    let a = Curve::from_xy(&xs, &ys_a).py()?;
    let b = Curve::from_xy(&xs, &ys_b).py()?;
    tpd::find_intersections(&a, &b).py()
}

/// One increment size of a sweep.
#[pyclass(frozen, from_py_object, module = "streamseq")]
#[derive(Clone)]
pub struct SweepPoint {
    inner: tpd::SweepPoint,
}

#[pymethods]
impl SweepPoint {
    #[getter]
    fn delta_size(&self) -> usize {
        self.inner.delta_size
    }

    #[getter]
    fn t_full(&self) -> f64 {
        self.inner.t_full
    }

    #[getter]
    fn t_ius(&self) -> f64 {
        self.inner.t_ius
    }

    #[getter]
    fn speedup(&self) -> f64 {
        self.inner.speedup
    }

    #[getter]
    fn difference(&self) -> f64 {
        self.inner.difference.to_f64()
    }

    fn __repr__(&self) -> String {
        format!(
            "SweepPoint(delta_size={}, speedup={:.6}, difference={})",
            self.inner.delta_size, self.inner.speedup, self.inner.difference
        )
    }
}

#[pyfunction]
#[pyo3(signature = (log, initial, deltas, params, timing = "cost", repetitions = 5))]
fn sweep(
    log: &EventLog,
    initial: usize,
    deltas: Vec<usize>,
    params: &PyMiningParams,
    timing: &str,
    repetitions: usize,
) -> PyResult<Vec<SweepPoint>> {
    let timing = match timing {
        "cost" => TimingMode::CostUnits,
        "wall" => TimingMode::WallClock,
        other => {
            return Err(PyValueError::new_err(format!(
                "timing must be 'cost' or 'wall', got {other:?}"
            )))
        }
    };
    let cfg = SweepConfig {
        initial_size: initial,
        delta_sizes: deltas,
        params: params.inner,
        timing,
        repetitions,
    };
    Ok(tpd::run_sweep(&log.queue, &cfg)
        .py()?
        .into_iter()
        .map(|inner| SweepPoint { inner })
        .collect())
}

/// Recommended incremental ratio for a sweep, as a dict.
#[pyfunction]
fn recommend<'py>(
    py: Python<'py>,
    points: Vec<SweepPoint>,
    initial: usize,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    use pyo3::types::PyDict;
    let pts: Vec<tpd::SweepPoint> = points.into_iter().map(|p| p.inner).collect();
    let rec = tpd::recommend(&pts, initial).py()?;
    let d = PyDict::new(py);
    d.set_item("crossings", &rec.crossings)?;
    d.set_item("crossing_x", rec.chosen_x)?;
    d.set_item("ratio", rec.ratio)?;
    d.set_item("ratio_range", rec.ratio_range)?;
    d.set_item("degenerate", rec.degenerate)?;
    d.set_item("speedup_norm", rec.speedup_norm.ys().collect::<Vec<_>>())?;
    d.set_item(
        "difference_norm",
        rec.difference_norm.ys().collect::<Vec<_>>(),
    )?;
    Ok(d)
}

/// Synthetic alarm-style log. Patterns are `(type_indices, rate_per_1000)`.
#[pyfunction]
#[pyo3(signature = (n_types, n_events, seed, embedded = vec![], drift_at = None, drift_embedded = vec![], tuple_fill = 1.0))]
fn generate(
    n_types: usize,
    n_events: usize,
    seed: u64,
    embedded: Vec<(Vec<usize>, f64)>,
    drift_at: Option<usize>,
    drift_embedded: Vec<(Vec<usize>, f64)>,
    tuple_fill: f64,
) -> PyResult<EventLog> {
    let patterns = |v: Vec<(Vec<usize>, f64)>| {
        v.into_iter()
            .map(|(items, rate)| EmbeddedPattern::new(items, rate))
            .collect()
    };
    let mut cfg = GenConfig::new(n_types, n_events, seed);
    cfg.embedded = patterns(embedded);
    cfg.drift_at = drift_at;
    cfg.drift_embedded = patterns(drift_embedded);
    cfg.tuple_fill = tuple_fill;
    Ok(EventLog {
        queue: generator::generate(&cfg).py()?,
    })
}

#[pymodule]
#[pyo3(name = "streamseq")]
fn streamseq_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<EventLog>()?;
    m.add_class::<PyMiningParams>()?;
    m.add_class::<PyPatternSet>()?;
    m.add_class::<SweepPoint>()?;
    m.add_function(wrap_pyfunction!(mine, m)?)?;
    m.add_function(wrap_pyfunction!(ius_update, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(min_max_normalize, m)?)?;
    m.add_function(wrap_pyfunction!(find_intersections, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(recommend, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
