//! Behavioral diversity measures over point clouds in `[0, 1]^d`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Mean distance to the k nearest neighbors, normalized by the expected
/// 1-NN distance of the same number of uniform points in the unit cube.
/// The normalization makes the measure insensitive to the sample size.
///
/// The uniform baseline is a Monte Carlo estimate (200 repetitions per
/// `(n, d)`, fixed internal seed) cached across calls.
pub fn knn_diversity(points: &[Vec<f64>], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid_input("k must be >= 1"));
    }
    if points.len() < k + 1 {
        return Err(Error::invalid_input(format!(
            "knn diversity needs at least {} points, have {}",
            k + 1,
            points.len()
        )));
    }
    let d = points[0].len();
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::invalid_input("points have mixed dimensions"));
    }
    let raw = mean_knn_distance(points, k);
    Ok(raw / uniform_one_nn_baseline(points.len(), d))
}

fn mean_knn_distance(points: &[Vec<f64>], k: usize) -> f64 {
    let n = points.len();
    let per_point: f64 = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            // Distances to everyone else; keep the k smallest.
            let mut dists: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| euclid(p, &points[j]))
                .collect();
            dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
            dists[..k].iter().sum::<f64>() / k as f64
        })
        .sum();
    per_point / n as f64
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn uniform_one_nn_baseline(n: usize, d: usize) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().unwrap().get(&(n, d)) {
        return v;
    }
    const REPS: u64 = 200;
    let total: f64 = (0..REPS)
        .into_par_iter()
        .map(|rep| {
            let mut r: Stream = rng::stream(0x6e6e_5f62_6173_65u64 ^ rep, &[n as u64, d as u64]);
            let pts: Vec<Vec<f64>> =
                (0..n).map(|_| (0..d).map(|_| r.random_range(0.0..1.0)).collect()).collect();
            mean_knn_distance(&pts, 1)
        })
        .sum();
    let v = total / REPS as f64;
    cache.lock().unwrap().insert((n, d), v);
    v
}

/// Grid resolution for the discretized measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellGrid {
    /// Each dimension split into this many intervals.
    PerDim(usize),
    /// Total cell budget; the per-dimension resolution is the nearest
    /// integer root. A budget equal to the number of points makes coverage
    /// insensitive to the sample size.
    TotalCells(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMetrics {
    pub coverage: f64,
    pub entropy: f64,
    pub occupied_cells: usize,
    pub total_cells: usize,
}

/// Discretize the unit cube and report the fraction of occupied cells and
/// the entropy of the occupancy distribution.
pub fn cell_metrics(points: &[Vec<f64>], grid: CellGrid) -> Result<CellMetrics> {
    if points.is_empty() {
        return Err(Error::invalid_input("cell metrics need at least one point"));
    }
    let d = points[0].len();
    if d == 0 || points.iter().any(|p| p.len() != d) {
        return Err(Error::invalid_input("points have mixed or zero dimensions"));
    }
    let per_dim = match grid {
        CellGrid::PerDim(c) => c.max(1),
        CellGrid::TotalCells(total) => {
            ((total.max(1) as f64).powf(1.0 / d as f64).round() as usize).max(1)
        }
    };
    let total_cells = per_dim.pow(d as u32);
    let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
    for p in points {
        let cell: Vec<usize> = p
            .iter()
            .map(|&x| (((x.clamp(0.0, 1.0)) * per_dim as f64) as usize).min(per_dim - 1))
            .collect();
        *counts.entry(cell).or_insert(0) += 1;
    }
    let n = points.len() as f64;
    let entropy: f64 = -counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>();
    Ok(CellMetrics {
        coverage: counts.len() as f64 / total_cells as f64,
        entropy,
        occupied_cells: counts.len(),
        total_cells,
    })
}

/// Standard deviation of the observation vectors, averaged across
/// dimensions (population convention).
pub fn observation_diversity(observations: &[Vec<f64>]) -> Result<f64> {
    if observations.is_empty() {
        return Err(Error::invalid_input("observation diversity needs at least one vector"));
    }
    let d = observations[0].len();
    if d == 0 || observations.iter().any(|o| o.len() != d) {
        return Err(Error::invalid_input("observations have mixed or zero dimensions"));
    }
    let n = observations.len() as f64;
    let mut total = 0.0;
    for dim in 0..d {
        let mean: f64 = observations.iter().map(|o| o[dim]).sum::<f64>() / n;
        let var: f64 = observations.iter().map(|o| (o[dim] - mean).powi(2)).sum::<f64>() / n;
        total += var.sqrt();
    }
    Ok(total / d as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_points(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut r = rng::stream(seed, &[rng::tag::ANALYSIS]);
        (0..n).map(|_| (0..d).map(|_| r.random_range(0.0..1.0)).collect()).collect()
    }

    #[test]
    fn identical_points_have_zero_diversity() {
        let pts = vec![vec![0.3, 0.3, 0.3]; 20];
        assert_eq!(knn_diversity(&pts, 1).unwrap(), 0.0);
        let m = cell_metrics(&pts, CellGrid::PerDim(4)).unwrap();
        assert_eq!(m.entropy, 0.0);
        assert_eq!(m.occupied_cells, 1);
    }

    #[test]
    fn uniform_samples_normalize_to_about_one() {
        let pts = uniform_points(500, 3, 5);
        let v = knn_diversity(&pts, 1).unwrap();
        assert!((v - 1.0).abs() < 0.1, "normalized diversity {v}");
    }

    #[test]
    fn normalization_is_insensitive_to_sample_size() {
        let a = knn_diversity(&uniform_points(250, 3, 6), 1).unwrap();
        let b = knn_diversity(&uniform_points(500, 3, 7), 1).unwrap();
        assert!((a - 1.0).abs() < 0.12, "n=250: {a}");
        assert!((b - 1.0).abs() < 0.12, "n=500: {b}");
    }

    #[test]
    fn too_few_points_is_an_input_error() {
        let pts = vec![vec![0.1], vec![0.2]];
        assert!(knn_diversity(&pts, 2).is_err());
        assert!(knn_diversity(&[], 1).is_err());
    }

    #[test]
    fn diversity_is_permutation_and_isometry_invariant() {
        let pts = uniform_points(60, 3, 8);
        let base = knn_diversity(&pts, 2).unwrap();
        let mut reversed = pts.clone();
        reversed.reverse();
        assert!((knn_diversity(&reversed, 2).unwrap() - base).abs() < 1e-12);
        // Reflection x -> 1 - x keeps points inside the cube.
        let reflected: Vec<Vec<f64>> =
            pts.iter().map(|p| p.iter().map(|x| 1.0 - x).collect()).collect();
        assert!((knn_diversity(&reflected, 2).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn one_cell_coverage_and_zero_entropy() {
        let pts = vec![vec![0.05, 0.05]; 7];
        let m = cell_metrics(&pts, CellGrid::PerDim(3)).unwrap();
        assert_eq!(m.total_cells, 9);
        assert!((m.coverage - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(m.entropy, 0.0);
    }

    #[test]
    fn full_occupancy_in_a_matching_grid() {
        // 1-d: n points in n distinct cells of an n-cell grid.
        let n = 8;
        let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![(i as f64 + 0.5) / n as f64]).collect();
        let m = cell_metrics(&pts, CellGrid::TotalCells(n)).unwrap();
        assert_eq!(m.total_cells, n);
        assert_eq!(m.coverage, 1.0);
    }

    #[test]
    fn equal_occupancy_entropy_is_log_c() {
        let mut pts = Vec::new();
        let c = 5;
        for i in 0..c {
            for _ in 0..4 {
                pts.push(vec![(i as f64 + 0.5) / c as f64]);
            }
        }
        let m = cell_metrics(&pts, CellGrid::PerDim(c)).unwrap();
        assert!((m.entropy - (c as f64).ln()).abs() < 1e-12);
        // Entropy never exceeds ln(occupied).
        assert!(m.entropy <= (m.occupied_cells as f64).ln() + 1e-12);
    }

    #[test]
    fn boundary_points_land_in_the_last_cell() {
        let pts = vec![vec![1.0], vec![0.999]];
        let m = cell_metrics(&pts, CellGrid::PerDim(10)).unwrap();
        assert_eq!(m.occupied_cells, 1);
    }

    #[test]
    fn observation_diversity_matches_a_hand_computed_fixture() {
        // Three 2-d observations; per-dim population stds computed by hand:
        // dim 0: values 0, 1, 2 -> mean 1, var 2/3; dim 1: 1, 1, 4 -> mean 2,
        // var 2. Average of sqrt(2/3) and sqrt(2).
        let obs = vec![vec![0.0, 1.0], vec![1.0, 1.0], vec![2.0, 4.0]];
        let expect = ((2.0_f64 / 3.0).sqrt() + 2.0_f64.sqrt()) / 2.0;
        assert!((observation_diversity(&obs).unwrap() - expect).abs() < 1e-12);
    }
}
