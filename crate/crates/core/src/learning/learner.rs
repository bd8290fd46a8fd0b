use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Running mean and variance of normalized silent-symbol measurements.
///
/// Each observation `I` is divided by the scale `|Φ†|/L† + 1` of its frame
/// before entering the recursions
/// `M^n = ((n-1)/n) M^{n-1} + I'/n` and
/// `V^n = ((n-2)/(n-1)) V^{n-1} + (I' - M^{n-1})² / (n-1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerState {
    n: u64,
    mean: f64,
    variance: f64,
    last_scale: Option<f64>,
}

impl Default for LearnerState {
    fn default() -> Self {
        Self::with_initial(0.0, 0.0)
    }
}

impl LearnerState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts the recursion from `(M^0, V^0)`.
    pub fn with_initial(mean: f64, variance: f64) -> Self {
        LearnerState {
            n: 0,
            mean,
            variance,
            last_scale: None,
        }
    }

    /// Number of updates applied.
    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn last_scale(&self) -> Option<f64> {
        self.last_scale
    }

    /// Applies one measurement with its frame's scale `|Φ†|/L† + 1`.
    pub fn update(&mut self, observation: f64, scale: f64) -> Result<()> {
        if !(scale >= 1.0) || !observation.is_finite() {
            return Err(Error::Config(format!(
                "learner input {observation} with scale {scale}"
            )));
        }
        let x = observation / scale;
        self.n += 1;
        let n = self.n as f64;
        let previous = self.mean;
        self.mean = ((n - 1.0) / n) * previous + x / n;
        if self.n >= 2 {
            let d = x - previous;
            self.variance = ((n - 2.0) / (n - 1.0)) * self.variance + d * d / (n - 1.0);
        }
        self.last_scale = Some(scale);
        Ok(())
    }

    /// `M^n`; `None` before the first update.
    pub fn mean(&self) -> Option<f64> {
        (self.n >= 1).then_some(self.mean)
    }

    /// `V^n`; undefined until two updates have been applied.
    pub fn variance(&self) -> Result<f64> {
        if self.n < 2 {
            return Err(Error::Unavailable(format!(
                "variance needs two measurements, have {}",
                self.n
            )));
        }
        Ok(self.variance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Gamma};

    #[test]
    fn first_update_erases_initial_state() {
        let mut a = LearnerState::with_initial(123.0, 9.0);
        let mut b = LearnerState::new();
        a.update(2.2, 1.1).unwrap();
        b.update(2.2, 1.1).unwrap();
        assert_eq!(a.mean(), Some(2.2 / 1.1));
        assert_eq!(a.mean(), b.mean());
        assert!(a.variance().is_err());
        a.update(1.0, 1.1).unwrap();
        b.update(1.0, 1.1).unwrap();
        assert_eq!(a.variance().unwrap(), b.variance().unwrap());
    }

    #[test]
    fn constant_stream_is_a_fixed_point() {
        let mut s = LearnerState::new();
        for _ in 0..100 {
            s.update(0.3, 1.5).unwrap();
            assert!((s.mean().unwrap() - 0.2).abs() < 1e-15);
        }
        assert!(s.variance().unwrap() < 1e-30);
        assert_eq!(s.count(), 100);
    }

    #[test]
    fn empty_state_has_no_statistics() {
        let s = LearnerState::new();
        assert_eq!(s.mean(), None);
        assert!(s.variance().is_err());
    }

    #[test]
    fn iid_stream_converges() {
        // Gamma(k, th): mean k th, variance k th²
        let (k, th, scale) = (2.0, 0.5, 1.25);
        let dist = Gamma::new(k, th).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut s = LearnerState::new();
        let n = 10_000;
        for _ in 0..n {
            s.update(dist.sample(&mut rng), scale).unwrap();
        }
        let mu = k * th / scale;
        let var = k * th * th / (scale * scale);
        assert!((s.mean().unwrap() - mu).abs() <= 3.0 * var.sqrt() / (n as f64).sqrt());
        assert!((s.variance().unwrap() / var - 1.0).abs() <= 0.10);
    }

    #[test]
    fn mean_does_not_depend_on_order_beyond_rounding() {
        let xs: Vec<f64> = (0..500).map(|i| ((i * 37) % 101) as f64 * 0.01).collect();
        let mut fwd = LearnerState::new();
        let mut rev = LearnerState::new();
        for &x in &xs {
            fwd.update(x, 1.0).unwrap();
        }
        for &x in xs.iter().rev() {
            rev.update(x, 1.0).unwrap();
        }
        let exact = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((fwd.mean().unwrap() - exact).abs() < 1e-13);
        assert!((rev.mean().unwrap() - exact).abs() < 1e-13);
        let v = (fwd.variance().unwrap() / rev.variance().unwrap() - 1.0).abs();
        assert!(v < 0.05);
    }
}
