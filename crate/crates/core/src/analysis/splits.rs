//! Seed-variability protocol: how often do two disjoint 20-run groups of the
//! same algorithm look statistically different?

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::analysis::stats::{bootstrap_ci, t_test};
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Fraction of random 20/20 splits flagged significant by each test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitVariability {
    pub splits: usize,
    pub t_significant_pct: f64,
    pub bootstrap_significant_pct: f64,
}

/// Draw `splits` random partitions of 40 per-seed metrics into two disjoint
/// 20-run groups and report the percentage flagged significant by the
/// t-test (p <= 0.05) and by the bootstrap interval (0 outside the 95% CI).
///
/// With more than 40 metrics, each split first samples 40 of them without
/// replacement.
pub fn split_variability(
    metrics: &[f64],
    splits: usize,
    resamples: usize,
    rng: &mut Stream,
) -> Result<SplitVariability> {
    if metrics.len() < 40 {
        return Err(Error::invalid_input(format!(
            "split variability needs 40 run metrics, have {}",
            metrics.len()
        )));
    }
    if splits == 0 {
        return Err(Error::invalid_input("need at least one split"));
    }
    // One derived stream per split keeps the computation order-independent
    // under parallel execution.
    let master: u64 = rng.random();
    let flags: Vec<(bool, bool)> = (0..splits)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(master, &[i as u64]);
            let mut indices: Vec<usize> = (0..metrics.len()).collect();
            indices.shuffle(&mut r);
            let a: Vec<f64> = indices[..20].iter().map(|&j| metrics[j]).collect();
            let b: Vec<f64> = indices[20..40].iter().map(|&j| metrics[j]).collect();
            let t_sig = match t_test(&a, &b) {
                Ok((_, p)) => p <= 0.05,
                Err(_) => false,
            };
            let bs_sig = bootstrap_ci(&a, &b, resamples, &mut r)
                .map(|ci| ci.significant)
                .unwrap_or(false);
            (t_sig, bs_sig)
        })
        .collect();
    let t_count = flags.iter().filter(|f| f.0).count();
    let bs_count = flags.iter().filter(|f| f.1).count();
    Ok(SplitVariability {
        splits,
        t_significant_pct: 100.0 * t_count as f64 / splits as f64,
        bootstrap_significant_pct: 100.0 * bs_count as f64 / splits as f64,
    })
}
