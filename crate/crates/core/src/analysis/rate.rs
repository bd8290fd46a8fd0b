use serde::{Deserialize, Serialize};

use super::{q_function, q_inverse, SinrStats};
use crate::{Error, Result};

/// `Pr[γ < T]` under the Gaussian approximation of the interference
/// functional, for an estimated set of size `set_size` and length `l_dagger`.
///
/// With zero variance the distribution is a step at `1 / (scale · M)`.
pub fn sinr_cdf(threshold: f64, stats: &SinrStats, set_size: f64, l_dagger: f64) -> f64 {
    let scale = set_size / l_dagger + 1.0;
    let gap = 1.0 / (threshold * scale) - stats.mean;
    if stats.variance > 0.0 {
        q_function(gap / stats.variance.sqrt())
    } else if gap > 0.0 {
        0.0
    } else if gap < 0.0 {
        1.0
    } else {
        0.5
    }
}

/// Rate of one block meeting an outage target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateEntry {
    pub block: usize,
    /// Linear SINR threshold `T`.
    pub threshold: f64,
    /// `log2(1 + T)` in bits/s/Hz.
    pub rate: f64,
}

/// Per-block thresholds and rates for one outage target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePlan {
    pub epsilon: f64,
    pub entries: Vec<RateEntry>,
}

/// Largest threshold `T` with `Pr[γ < T] = epsilon` and its rate.
pub fn rate_threshold(stats: &SinrStats, epsilon: f64, set_size: f64, l_dagger: f64) -> Result<RateEntry> {
    let z = q_inverse(epsilon)?;
    let level = z * stats.variance.max(0.0).sqrt() + stats.mean;
    if !(level > 0.0) {
        return Err(Error::UndefinedThreshold(level));
    }
    let threshold = 1.0 / (level * (set_size / l_dagger + 1.0));
    Ok(RateEntry {
        block: stats.block,
        threshold,
        rate: (1.0 + threshold).log2(),
    })
}

/// Analytic CDF sampled on a grid of thresholds in dB.
pub fn cdf_curve(stats: &SinrStats, set_size: f64, l_dagger: f64, grid_db: &[f64]) -> Vec<(f64, f64)> {
    grid_db
        .iter()
        .map(|&t| (t, sinr_cdf(10f64.powf(t / 10.0), stats, set_size, l_dagger)))
        .collect()
}

/// Empirical CDF of `samples` on a grid of thresholds in dB.
pub fn empirical_cdf_curve(samples_db: &[f64], grid_db: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = samples_db.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len().max(1) as f64;
    grid_db
        .iter()
        .map(|&t| (t, sorted.partition_point(|&s| s < t) as f64 / n))
        .collect()
}

/// Kolmogorov–Smirnov distance between the empirical distribution of
/// `samples` and the continuous CDF `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Provenance;

    fn stats(mean: f64, variance: f64) -> SinrStats {
        SinrStats::new(5, mean, variance, Provenance::Analytic)
    }

    #[test]
    fn median_threshold_gives_one_half() {
        let s = stats(0.02, 1e-5);
        let scale: f64 = 25.0 / 331.0 + 1.0;
        let t = 1.0 / (scale * 0.02);
        assert!((sinr_cdf(t, &s, 25.0, 331.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cdf_is_monotone_with_limits() {
        let s = stats(0.02, 1e-5);
        let mut prev = 0.0;
        for k in 0..1000 {
            let t = 10f64.powf(-2.0 + 6.0 * k as f64 / 999.0);
            let f = sinr_cdf(t, &s, 25.0, 331.0);
            assert!(f >= prev);
            prev = f;
        }
        assert!(sinr_cdf(1e-9, &s, 25.0, 331.0) < 1e-12);
        let top = q_function(-0.02 / 1e-5f64.sqrt());
        assert!((sinr_cdf(1e12, &s, 25.0, 331.0) - top).abs() < 1e-9);
    }

    #[test]
    fn half_outage_drops_the_variance_term() {
        let s = stats(0.02, 4e-4);
        let e = rate_threshold(&s, 0.5, 10.0, 131.0).unwrap();
        let expect = 1.0 / (0.02 * (10.0 / 131.0 + 1.0));
        assert!((e.threshold / expect - 1.0).abs() < 1e-12);
        assert_eq!(e.rate, (1.0 + e.threshold).log2());
    }

    #[test]
    fn smaller_outage_means_lower_rate() {
        let s = stats(0.02, 4e-5);
        let r: Vec<f64> = [0.01, 0.05, 0.1]
            .iter()
            .map(|&e| rate_threshold(&s, e, 10.0, 131.0).unwrap().rate)
            .collect();
        assert!(r[0] < r[1] && r[1] < r[2]);
    }

    #[test]
    fn undefined_threshold_is_reported() {
        let s = stats(0.01, 1.0);
        assert!(matches!(
            rate_threshold(&s, 0.9, 10.0, 131.0),
            Err(Error::UndefinedThreshold(_))
        ));
        assert!(rate_threshold(&s, 1.0, 10.0, 131.0).is_err());
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let n = 1000;
        let samples: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_distance(&samples, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn empirical_curve_counts_strictly_below() {
        let c = empirical_cdf_curve(&[1.0, 2.0, 3.0, 4.0], &[0.0, 2.0, 2.5, 10.0]);
        assert_eq!(c, vec![(0.0, 0.0), (2.0, 0.25), (2.5, 0.5), (10.0, 1.0)]);
    }
}
