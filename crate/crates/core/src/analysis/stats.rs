//! Two-sample comparison battery: Welch's t-test, bootstrap confidence
//! interval of the mean difference, and Pearson correlation.

use rand::Rng;

use crate::analysis::special::student_t_two_sided_p;
use crate::error::{Error, Result};
use crate::rng::Stream;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_variance(xs: &[f64], m: f64) -> f64 {
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Welch's two-sample t-test, two-sided.
///
/// Returns `(t, p)`. When both samples have zero variance: equal means give
/// `(0, 1)` by convention, distinct means are a degenerate-variance error.
pub fn t_test(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::invalid_input("t-test needs at least two values per sample"));
    }
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (sample_variance(a, ma), sample_variance(b, mb));
    if va == 0.0 && vb == 0.0 {
        if ma == mb {
            return Ok((0.0, 1.0));
        }
        return Err(Error::invalid_input(
            "degenerate variances: both samples are constant with distinct means",
        ));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let se2 = va / na + vb / nb;
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2
        / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    let p = student_t_two_sided_p(t, df)?;
    Ok((t, p))
}

/// Percentile bootstrap for the difference of means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapCi {
    pub mean_diff: f64,
    pub lo: f64,
    pub hi: f64,
    /// `0 is outside [lo, hi]`.
    pub significant: bool,
}

/// Resample both groups with replacement `resamples` times; report the
/// empirical 2.5% / 97.5% order statistics of `mean(a*) - mean(b*)`.
pub fn bootstrap_ci(a: &[f64], b: &[f64], resamples: usize, rng: &mut Stream) -> Result<BootstrapCi> {
    if a.is_empty() || b.is_empty() || resamples == 0 {
        return Err(Error::invalid_input("bootstrap needs non-empty samples and resamples > 0"));
    }
    let mut diffs = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut sa = 0.0;
        for _ in 0..a.len() {
            sa += a[rng.random_range(0..a.len())];
        }
        let mut sb = 0.0;
        for _ in 0..b.len() {
            sb += b[rng.random_range(0..b.len())];
        }
        diffs.push(sa / a.len() as f64 - sb / b.len() as f64);
    }
    diffs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let lo_idx = ((resamples as f64) * 0.025).floor() as usize;
    let hi_idx = (((resamples as f64) * 0.975).ceil() as usize).saturating_sub(1);
    let lo = diffs[lo_idx.min(resamples - 1)];
    let hi = diffs[hi_idx.min(resamples - 1)];
    Ok(BootstrapCi {
        mean_diff: mean(a) - mean(b),
        lo,
        hi,
        significant: !(lo <= 0.0 && 0.0 <= hi),
    })
}

/// Sample Pearson correlation with its two-sided p-value (t transform with
/// n - 2 degrees of freedom).
pub fn pearson(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::invalid_input("pearson needs equal-length samples"));
    }
    if x.len() < 3 {
        return Err(Error::invalid_input("pearson needs at least 3 pairs"));
    }
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
        syy += (yi - my) * (yi - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::invalid_input("pearson is undefined for zero-variance samples"));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let df = (x.len() - 2) as f64;
    let p = if (1.0 - r * r) < 1e-15 {
        0.0
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        student_t_two_sided_p(t, df)?
    };
    Ok((r, p))
}

/// Both tests at once, as reported in comparison tables.
#[derive(Debug, Clone, Copy)]
pub struct ComparisonReport {
    pub t_statistic: f64,
    pub t_p_value: f64,
    pub t_significant: bool,
    pub bootstrap: BootstrapCi,
}

pub fn compare(a: &[f64], b: &[f64], resamples: usize, rng: &mut Stream) -> Result<ComparisonReport> {
    let (t, p) = t_test(a, b)?;
    let bootstrap = bootstrap_ci(a, b, resamples, rng)?;
    Ok(ComparisonReport { t_statistic: t, t_p_value: p, t_significant: p <= 0.05, bootstrap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn identical_samples_are_maximally_insignificant() {
        let (t, p) = t_test(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(t, 0.0);
        assert!((p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn welch_fixture_matches_the_hand_applied_formula() {
        // a = [1..4], b = [2..5]: means 2.5/3.5, both variances 5/3,
        // t = -1 / sqrt(5/6), Welch df = 6.
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [2.0, 3.0, 4.0, 5.0];
        let (t, p) = t_test(&a, &b).unwrap();
        let t_hand = -1.0 / (5.0_f64 / 6.0).sqrt();
        assert!((t - t_hand).abs() < 1e-12);
        assert!((t - (-1.0954451150103324)).abs() < 1e-12);
        // Reference p-value for t with df = 6 (cross-checked against the
        // quadrature oracle in the special-function tests).
        assert!((p - 0.3153335962012296).abs() < 1e-10, "p {p}");
    }

    #[test]
    fn swapping_samples_negates_t_and_keeps_p() {
        let a = [0.3, 1.7, 2.9, 0.1];
        let b = [1.2, 2.5, 3.3];
        let (t1, p1) = t_test(&a, &b).unwrap();
        let (t2, p2) = t_test(&b, &a).unwrap();
        assert!((t1 + t2).abs() < 1e-15);
        assert_eq!(p1, p2);
    }

    #[test]
    fn degenerate_variances_error_unless_means_agree() {
        assert!(t_test(&[2.0, 2.0], &[3.0, 3.0]).is_err());
        let (t, p) = t_test(&[2.0, 2.0], &[2.0, 2.0]).unwrap();
        assert_eq!((t, p), (0.0, 1.0));
        assert!(t_test(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn bootstrap_contains_zero_for_identical_groups() {
        let a = [3.0, 4.0, 5.0, 6.0, 7.0];
        let mut r = rng::stream(1, &[rng::tag::ANALYSIS]);
        let ci = bootstrap_ci(&a, &a, 2000, &mut r).unwrap();
        assert!(ci.lo <= 0.0 && 0.0 <= ci.hi);
        assert!(!ci.significant);
        assert_eq!(ci.mean_diff, 0.0);
    }

    #[test]
    fn bootstrap_separates_disjoint_groups() {
        // a uniform-ish in [100, 101], b in [0, 1]: separation dwarfs noise.
        let a: Vec<f64> = (0..20).map(|i| 100.0 + i as f64 / 20.0).collect();
        let b: Vec<f64> = (0..20).map(|i| i as f64 / 20.0).collect();
        let mut r = rng::stream(2, &[rng::tag::ANALYSIS]);
        let ci = bootstrap_ci(&a, &b, 10_000, &mut r).unwrap();
        assert!(ci.lo > 0.0);
        assert!(ci.significant);
        assert!((ci.mean_diff - 100.0).abs() < 1e-12);
    }

    #[test]
    fn bootstrap_is_seed_reproducible() {
        let a = [1.0, 2.0, 3.0, 4.0, 9.0];
        let b = [2.0, 2.5, 3.5, 5.0];
        let c1 = bootstrap_ci(&a, &b, 5000, &mut rng::stream(3, &[7])).unwrap();
        let c2 = bootstrap_ci(&a, &b, 5000, &mut rng::stream(3, &[7])).unwrap();
        assert_eq!(c1, c2);
    }

    #[test]
    fn pearson_perfect_lines() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y_pos = x;
        let (r, p) = pearson(&x, &y_pos).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert!(p < 1e-12);
        let y_neg: Vec<f64> = x.iter().map(|v| -2.0 * v + 3.0).collect();
        let (r, _) = pearson(&x, &y_neg).unwrap();
        assert!((r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_fixture_matches_the_direct_formula() {
        let x = [0.1, 0.5, 0.9, 1.3, 1.7, 2.1, 2.9, 3.3, 3.8, 4.2];
        let y = [1.02, 0.83, 1.91, 2.04, 2.93, 2.61, 3.58, 4.43, 4.01, 5.12];
        // Independent oracle: direct covariance formula written out here.
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let cov: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let vx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
        let vy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
        let r_hand = cov / (vx * vy).sqrt();

        let (r, p) = pearson(&x, &y).unwrap();
        assert!((r - r_hand).abs() < 1e-12);
        assert!((r - 0.9720824232252123).abs() < 1e-12);
        // Reference p-value (t transform, df = 8).
        assert!((p - 2.5695949917123234e-6).abs() / 2.5695949917123234e-6 < 1e-8, "p {p}");
    }

    #[test]
    fn pearson_rejects_degenerate_inputs() {
        assert!(pearson(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }
}
