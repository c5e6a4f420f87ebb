//! Tradeoff between update performance and pattern difference.
//!
//! A sweep grows the increment after a fixed initial window and records, per
//! increment size, the speedup of the incremental update over a full re-mine
//! and the distance between the old and new frequent sets. Both series are
//! min-max normalized onto `[0, 1]`; where the two piecewise-linear curves
//! cross is the recommended increment, reported as a ratio of the initial
//! window size.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::diffmetric::{distance, Distance, PatternKeySet};
use crate::error::{Error, Result};
use crate::ius::{ius_update_with_stats, speedup, UpdateInput};
use crate::miner::{mine, mine_with_cost, MiningParams, PatternSet};
use crate::stream_model::{StreamQueue, ViewWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimingMode {
    /// Deterministic [`CostCounter`](crate::occurrence::CostCounter) totals.
    CostUnits,
    /// Median wall-clock seconds over the configured repetitions.
    WallClock,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub initial_size: usize,
    pub delta_sizes: Vec<usize>,
    pub params: MiningParams,
    pub timing: TimingMode,
    pub repetitions: usize,
}

impl SweepConfig {
    pub fn validate(&self, queue_len: usize) -> Result<()> {
        if self.initial_size == 0 {
            return Err(Error::Param("initial window must be non-empty".into()));
        }
        if self.delta_sizes.is_empty() {
            return Err(Error::Param(
                "at least one increment size is required".into(),
            ));
        }
        if self.delta_sizes[0] == 0 {
            return Err(Error::Param("increment sizes must be at least 1".into()));
        }
        if self.delta_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Param(
                "increment sizes must strictly increase".into(),
            ));
        }
        if self.timing == TimingMode::WallClock && self.repetitions == 0 {
            return Err(Error::Param(
                "wall-clock timing needs at least one repetition".into(),
            ));
        }
        let need = self.initial_size + self.delta_sizes.last().copied().unwrap_or(0);
        if need > queue_len {
            return Err(Error::Bounds {
                start: 0,
                end: need,
                len: queue_len,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub delta_size: usize,
    pub t_full: f64,
    pub t_ius: f64,
    pub speedup: f64,
    pub difference: Distance,
}

pub fn run_sweep(queue: &StreamQueue, cfg: &SweepConfig) -> Result<Vec<SweepPoint>> {
    cfg.validate(queue.len())?;
    let initial = queue.window(0, cfg.initial_size)?;
    let old = mine(&[initial], &cfg.params)?;
    let measure = |&d: &usize| measure_point(queue, initial, &old, d, cfg);
    match cfg.timing {
        TimingMode::CostUnits => cfg.delta_sizes.par_iter().map(measure).collect(),
        TimingMode::WallClock => cfg.delta_sizes.iter().map(measure).collect(),
    }
}

fn measure_point(
    queue: &StreamQueue,
    initial: ViewWindow<'_>,
    old: &PatternSet,
    delta_size: usize,
    cfg: &SweepConfig,
) -> Result<SweepPoint> {
    let increment = queue.window(initial.end(), delta_size)?;
    let delta = mine(&[increment], &cfg.params)?;
    let old_blocks = [initial];
    let delta_blocks = [increment];
    let input = UpdateInput {
        old,
        delta: &delta,
        old_blocks: &old_blocks,
        delta_blocks: &delta_blocks,
        params: cfg.params,
    };

    let (updated, t_full, t_ius) = match cfg.timing {
        TimingMode::CostUnits => {
            let (_, full_cost) = mine_with_cost(&[initial, increment], &cfg.params)?;
            let (updated, stats) = ius_update_with_stats(&input)?;
            (updated, full_cost.total() as f64, stats.cost.total() as f64)
        }
        TimingMode::WallClock => {
            let t_full = median_secs(cfg.repetitions, || {
                mine(&[initial, increment], &cfg.params).map(drop)
            })?;
            let t_ius = median_secs(cfg.repetitions, || ius_update_with_stats(&input).map(drop))?;
            let (updated, _) = ius_update_with_stats(&input)?;
            (updated, t_full, t_ius)
        }
    };

    Ok(SweepPoint {
        delta_size,
        t_full,
        t_ius,
        speedup: speedup(t_full, t_ius)?,
        difference: distance(
            &PatternKeySet::frequent(old),
            &PatternKeySet::frequent(&updated),
        ),
    })
}

fn median_secs(reps: usize, mut f: impl FnMut() -> Result<()>) -> Result<f64> {
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        f()?;
        samples.push(start.elapsed().as_secs_f64());
    }
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    Ok(if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        (samples[mid - 1] + samples[mid]) / 2.0
    })
}

/// Linear map of `values` onto `[new_min, new_max]`. A constant input maps
/// every element to `new_min`.
pub fn min_max_normalize(values: &[f64], new_min: f64, new_max: f64) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Contract("cannot normalize an empty list".into()));
    }
    if new_min.is_nan() || new_max.is_nan() || new_min > new_max {
        return Err(Error::Contract(format!(
            "target range [{new_min}, {new_max}] is inverted"
        )));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return Ok(vec![new_min; values.len()]);
    }
    Ok(values
        .iter()
        .map(|&v| (v - lo) / (hi - lo) * (new_max - new_min) + new_min)
        .collect())
}

/// Piecewise-linear curve over strictly increasing x.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points
            .windows(2)
            .any(|w| w[0].0.partial_cmp(&w[1].0) != Some(Ordering::Less))
        {
            return Err(Error::Contract(
                "curve x values must strictly increase".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn from_xy(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Contract("x and y lengths differ".into()));
        }
        Self::new(xs.iter().copied().zip(ys.iter().copied()).collect())
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    /// Linear interpolation; `None` outside the x range.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let first = self.points.first()?;
        let last = self.points.last()?;
        if x < first.0 || x > last.0 {
            return None;
        }
        let i = self.points.partition_point(|p| p.0 < x);
        if i < self.points.len() && self.points[i].0 == x {
            return Some(self.points[i].1);
        }
        let (x0, y0) = self.points[i - 1];
        let (x1, y1) = self.points[i];
        Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }
}

/// Every x where the interpolants of `a` and `b` cross or touch, ascending.
/// Grid points where they are equal are reported once each.
pub fn find_intersections(a: &Curve, b: &Curve) -> Result<Vec<f64>> {
    if a.points.len() < 2 || a.points.len() != b.points.len() {
        return Err(Error::Contract(
            "curves need identical grids of at least two points".into(),
        ));
    }
    if a.xs().zip(b.xs()).any(|(x, y)| x != y) {
        return Err(Error::Contract("curves are on different x grids".into()));
    }
    let g: Vec<(f64, f64)> = a
        .points
        .iter()
        .zip(&b.points)
        .map(|(&(x, ya), &(_, yb))| (x, ya - yb))
        .collect();

    let mut out = Vec::new();
    for (i, &(x0, g0)) in g.iter().enumerate() {
        if g0 == 0.0 {
            out.push(x0);
            continue;
        }
        if let Some(&(x1, g1)) = g.get(i + 1) {
            if g1 != 0.0 && (g0 < 0.0) != (g1 < 0.0) {
                out.push(x0 + (x1 - x0) * g0 / (g0 - g1));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation {
    pub initial_size: usize,
    pub crossings: Vec<f64>,
    /// First crossing; `None` when there is none or the input is degenerate.
    pub chosen_x: Option<f64>,
    pub ratio: Option<f64>,
    pub ratio_range: Option<(f64, f64)>,
    /// Set when either raw series is constant.
    pub degenerate: bool,
    pub speedup_norm: Curve,
    pub difference_norm: Curve,
}

pub fn recommend(points: &[SweepPoint], initial_size: usize) -> Result<Recommendation> {
    if points.len() < 2 {
        return Err(Error::Contract(
            "a recommendation needs at least two sweep points".into(),
        ));
    }
    if initial_size == 0 {
        return Err(Error::Param("initial window must be non-empty".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.delta_size as f64).collect();
    let speedups: Vec<f64> = points.iter().map(|p| p.speedup).collect();
    let diffs: Vec<f64> = points.iter().map(|p| p.difference.to_f64()).collect();
    let flat = |v: &[f64]| v.iter().all(|&x| x == v[0]);
    let degenerate = flat(&speedups) || flat(&diffs);

    let speedup_norm = Curve::from_xy(&xs, &min_max_normalize(&speedups, 0.0, 1.0)?)?;
    let difference_norm = Curve::from_xy(&xs, &min_max_normalize(&diffs, 0.0, 1.0)?)?;
    let crossings = find_intersections(&speedup_norm, &difference_norm)?;

    let init = initial_size as f64;
    let (chosen_x, ratio, ratio_range) = match (degenerate, crossings.first(), crossings.last()) {
        (false, Some(&first), Some(&last)) => (
            Some(first),
            Some(first / init),
            Some((first / init, last / init)),
        ),
        _ => (None, None, None),
    };
    Ok(Recommendation {
        initial_size,
        crossings,
        chosen_x,
        ratio,
        ratio_range,
        degenerate,
        speedup_norm,
        difference_norm,
    })
}

/// Curve export: one row per sweep point, reals at six decimals.
pub fn curve_csv(points: &[SweepPoint]) -> Result<String> {
    let speedups: Vec<f64> = points.iter().map(|p| p.speedup).collect();
    let diffs: Vec<f64> = points.iter().map(|p| p.difference.to_f64()).collect();
    let mut out = String::from("delta_size,speedup,difference,speedup_norm,difference_norm\n");
    if points.is_empty() {
        return Ok(out);
    }
    let sn = min_max_normalize(&speedups, 0.0, 1.0)?;
    let dn = min_max_normalize(&diffs, 0.0, 1.0)?;
    for (i, p) in points.iter().enumerate() {
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6}",
            p.delta_size, speedups[i], diffs[i], sn[i], dn[i]
        )
        .expect("writing to a String");
    }
    Ok(out)
}

/// Recommendation text when a sweep has too few points to intersect.
pub const NO_RECOMMENDATION: &str =
    "crossing_x=none\nratio=none\nrange_lo=none\nrange_hi=none\ndegenerate=true\ncrossings=none\n";

/// Key-value export of a recommendation. Absent values print as `none`.
pub fn recommendation_text(rec: &Recommendation) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |v| format!("{v:.6}"));
    let crossings: Vec<String> = rec.crossings.iter().map(|x| format!("{x:.6}")).collect();
    format!(
        "crossing_x={}\nratio={}\nrange_lo={}\nrange_hi={}\ndegenerate={}\ncrossings={}\n",
        opt(rec.chosen_x),
        opt(rec.ratio),
        opt(rec.ratio_range.map(|r| r.0)),
        opt(rec.ratio_range.map(|r| r.1)),
        rec.degenerate,
        if crossings.is_empty() {
            "none".to_string()
        } else {
            crossings.join(";")
        },
    )
}
