//! The append-only memory of explored policies.

use crate::error::{Error, Result};

/// One stored exploration result. `outcome` is normalized to `[0, 1]^d`.
/// The return and length are carried for analysis and harvesting only; goal
/// selection reads outcomes exclusively.
#[derive(Debug, Clone)]
pub struct ArchiveEntry {
    pub params: Vec<f64>,
    pub outcome: Vec<f64>,
    pub raw_outcome: Vec<f64>,
    pub episode_return: f64,
    pub episode_len: usize,
}

/// Append-only archive with nearest-neighbor lookup in outcome space.
/// Entries are never removed or mutated, so the best stored return is
/// non-decreasing over time.
#[derive(Debug, Clone, Default)]
pub struct Archive {
    entries: Vec<ArchiveEntry>,
}

impl Archive {
    pub fn new() -> Self {
        Archive::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, entry: ArchiveEntry) {
        self.entries.push(entry);
    }

    pub fn get(&self, i: usize) -> Option<&ArchiveEntry> {
        self.entries.get(i)
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    /// Index of the entry with the highest stored return (earliest on ties).
    pub fn best(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, e) in self.entries.iter().enumerate() {
            if best.is_none_or(|b| e.episode_return > self.entries[b].episode_return) {
                best = Some(i);
            }
        }
        best
    }

    /// Index of the entry minimizing Euclidean distance to `goal` in the
    /// normalized outcome space; ties break toward the lowest insertion
    /// index. Brute-force linear scan: archives stay in the thousands.
    pub fn nearest(&self, goal: &[f64]) -> Result<usize> {
        if self.entries.is_empty() {
            return Err(Error::invalid_state("nearest() on an empty archive"));
        }
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, e) in self.entries.iter().enumerate() {
            let d = sq_dist(&e.outcome, goal);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        Ok(best)
    }

    /// Indices of the `k` nearest entries, closest first; ties break toward
    /// lower insertion indices.
    pub fn k_nearest(&self, goal: &[f64], k: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.entries.len()).collect();
        order.sort_by(|&a, &b| {
            sq_dist(&self.entries[a].outcome, goal)
                .partial_cmp(&sq_dist(&self.entries[b].outcome, goal))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        order.truncate(k);
        order
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn entry(outcome: Vec<f64>, ret: f64) -> ArchiveEntry {
        ArchiveEntry {
            params: vec![0.0; 2],
            raw_outcome: outcome.clone(),
            outcome,
            episode_return: ret,
            episode_len: 10,
        }
    }

    #[test]
    fn nearest_prefers_the_closest_outcome() {
        let mut a = Archive::new();
        a.push(entry(vec![0.0, 0.0, 0.0], 0.0));
        a.push(entry(vec![1.0, 1.0, 1.0], 0.0));
        assert_eq!(a.nearest(&[0.1, 0.0, 0.0]).unwrap(), 0);
    }

    #[test]
    fn exact_match_wins() {
        let mut a = Archive::new();
        a.push(entry(vec![0.3, 0.3, 0.3], 0.0));
        a.push(entry(vec![0.7, 0.2, 0.9], 0.0));
        assert_eq!(a.nearest(&[0.7, 0.2, 0.9]).unwrap(), 1);
    }

    #[test]
    fn ties_break_by_insertion_order() {
        let mut a = Archive::new();
        a.push(entry(vec![0.4, 0.0, 0.0], 1.0));
        a.push(entry(vec![0.6, 0.0, 0.0], 2.0));
        // Goal equidistant from both.
        assert_eq!(a.nearest(&[0.5, 0.0, 0.0]).unwrap(), 0);
    }

    #[test]
    fn empty_archive_is_a_state_error() {
        let a = Archive::new();
        assert!(matches!(a.nearest(&[0.0]), Err(crate::Error::InvalidState(_))));
    }

    #[test]
    fn nearest_matches_an_independent_linear_scan() {
        // 1000 random archives and goals against a freshly written scan.
        let mut r = rng::stream(8, &[rng::tag::GEP]);
        for _ in 0..1000 {
            let n = r.random_range(1..30);
            let mut a = Archive::new();
            let mut outcomes = Vec::new();
            for _ in 0..n {
                let o: Vec<f64> = (0..3).map(|_| r.random_range(0.0..1.0)).collect();
                outcomes.push(o.clone());
                a.push(entry(o, 0.0));
            }
            let goal: Vec<f64> = (0..3).map(|_| r.random_range(0.0..1.0)).collect();

            let mut oracle = 0usize;
            let mut oracle_d = f64::INFINITY;
            for (i, o) in outcomes.iter().enumerate() {
                let d: f64 = o.iter().zip(&goal).map(|(x, y)| (x - y).powi(2)).sum();
                if d < oracle_d {
                    oracle_d = d;
                    oracle = i;
                }
            }
            assert_eq!(a.nearest(&goal).unwrap(), oracle);
        }
    }

    #[test]
    fn k_nearest_orders_by_distance() {
        let mut a = Archive::new();
        a.push(entry(vec![0.9, 0.0, 0.0], 0.0));
        a.push(entry(vec![0.1, 0.0, 0.0], 0.0));
        a.push(entry(vec![0.5, 0.0, 0.0], 0.0));
        assert_eq!(a.k_nearest(&[0.0, 0.0, 0.0], 2), vec![1, 2]);
        assert_eq!(a.k_nearest(&[0.0, 0.0, 0.0], 10), vec![1, 2, 0]);
    }

    #[test]
    fn best_return_is_non_decreasing_as_entries_arrive() {
        let mut a = Archive::new();
        let mut best = f64::NEG_INFINITY;
        for (i, ret) in [0.5, -1.0, 3.0, 2.0, 3.0].iter().enumerate() {
            a.push(entry(vec![i as f64 * 0.1, 0.0, 0.0], *ret));
            let b = a.get(a.best().unwrap()).unwrap().episode_return;
            assert!(b >= best);
            best = b;
        }
        // Earliest wins the 3.0 tie.
        assert_eq!(a.best().unwrap(), 2);
    }
}
