use crate::{Error, Result};

/// Tail probability of the standard normal distribution.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of [`q_function`] on `(0, 1)`.
///
/// Newton steps on `Q(x) - p`, falling back to bisection whenever a step
/// leaves the current bracket.
pub fn q_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Probability(p));
    }
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    let mut x = 0.0;
    for _ in 0..200 {
        let f = q_function(x) - p;
        // Q is decreasing: f > 0 means the root lies to the right
        if f > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut next = x + f / density;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() < 1e-14 * (1.0 + x.abs()) || hi - lo < 1e-14 {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}
