#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::Rng;
use streamseq::generator::{EmbeddedPattern, GenConfig};
use streamseq::miner::{MiningParams, Threshold};
use streamseq::occurrence::CountParams;
use streamseq::stream_model::{parse_event_log, StreamQueue};

/// Random log text: up to `max_types` labels, up to `max_tuples` tuples,
/// with a couple of recurring motifs so that longer sequences turn up.
pub fn random_log(rng: &mut impl Rng, max_types: usize, max_tuples: usize) -> String {
    let n_types = rng.random_range(2..=max_types);
    let n_tuples = rng.random_range(8..=max_tuples);
    let labels: Vec<String> = (0..n_types).map(|i| format!("e{i}")).collect();
    let motifs: Vec<Vec<&String>> = (0..2)
        .map(|_| {
            let len = rng.random_range(2..=4);
            (0..len).map(|_| labels.choose(rng).unwrap()).collect()
        })
        .collect();

    let mut tuples: Vec<Vec<&String>> = (0..n_tuples)
        .map(|_| {
            let k = rng.random_range(1..=3);
            (0..k).map(|_| labels.choose(rng).unwrap()).collect()
        })
        .collect();
    let mut i = 0;
    while i < n_tuples {
        if rng.random_bool(0.15) {
            let m = motifs.choose(rng).unwrap();
            for (j, l) in m.iter().enumerate() {
                if let Some(t) = tuples.get_mut(i + j) {
                    t.push(l);
                }
            }
        }
        i += 1;
    }

    let mut time = rng.random_range(-5..5i64);
    let mut out = String::new();
    for t in tuples {
        for l in t {
            out.push_str(&format!("{time},{l}\n"));
        }
        time += rng.random_range(1..4);
    }
    out
}

pub fn random_queue(rng: &mut impl Rng, max_types: usize, max_tuples: usize) -> StreamQueue {
    parse_event_log(&random_log(rng, max_types, max_tuples)).unwrap()
}

/// `min_supp` in [0.05, 0.5] in steps of 0.01, border threshold half of it.
pub fn random_params(rng: &mut impl Rng, max_len: Option<usize>) -> MiningParams {
    let k = rng.random_range(5..=50u64);
    let span = rng.random_range(2..=5);
    MiningParams::new(
        Threshold::new(k, 100).unwrap(),
        Threshold::new(k, 200).unwrap(),
        CountParams::new(span).unwrap(),
        max_len,
    )
    .unwrap()
}

/// Drifting alarm-log scenario: eight pairs fade out after the drift, three
/// new pairs take over at staggered rates.
pub fn drift_config(n_events: usize, drift_at: usize, seed: u64) -> GenConfig {
    let mut cfg = GenConfig::new(194, n_events, seed);
    cfg.embedded = [80.0, 75.0, 70.0, 65.0, 60.0, 55.0, 50.0, 45.0]
        .iter()
        .enumerate()
        .map(|(i, &r)| EmbeddedPattern::new(vec![10 + 2 * i, 11 + 2 * i], r))
        .collect();
    cfg.drift_at = Some(drift_at);
    cfg.drift_embedded = vec![
        EmbeddedPattern::new(vec![40, 41], 400.0),
        EmbeddedPattern::new(vec![42, 43], 200.0),
        EmbeddedPattern::new(vec![44, 45], 120.0),
    ];
    cfg
}

/// Thresholds used with [`drift_config`].
pub fn drift_params() -> MiningParams {
    MiningParams::new(
        "0.04".parse().unwrap(),
        "0.002".parse().unwrap(),
        CountParams::new(2).unwrap(),
        None,
    )
    .unwrap()
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            for &k in &idx[i..=j] {
                r[k] = (i + j) as f64 / 2.0;
            }
            i = j + 1;
        }
        r
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}
