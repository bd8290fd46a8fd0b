use nalgebra::{DMatrix, SVD};
use serde::{Deserialize, Serialize};

use crate::analysis::{Provenance, SinrStats};
use crate::channel::FrameConfig;
use crate::{Error, Result};

/// Learned statistics of one user of cell `cell`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserStat {
    pub index: usize,
    /// Large-scale gain toward its own BS.
    pub rho: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Three users of one cell with learned statistics and distinct gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserStatsTriple {
    pub cell: usize,
    pub users: [UserStat; 3],
}

/// Systems with a larger condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;

impl UserStatsTriple {
    pub fn new(cell: usize, users: [UserStat; 3]) -> Result<Self> {
        let t = UserStatsTriple { cell, users };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let r: Vec<f64> = self.users.iter().map(|u| u.rho).collect();
        if r.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::Config("large-scale gains must be positive".into()));
        }
        for i in 0..3 {
            for j in i + 1..3 {
                if r[i] == r[j] {
                    return Err(Error::DuplicateCoefficients);
                }
            }
        }
        Ok(())
    }

    /// Condition number of the column-equilibrated second-moment system with
    /// rows `[rho^-2, rho^-3, rho^-4]`.
    pub fn condition_number(&self) -> f64 {
        let mut u = DMatrix::from_fn(3, 3, |i, j| self.users[i].rho.powi(-(j as i32 + 2)));
        for j in 0..3 {
            let n = u.column(j).norm();
            u.column_mut(j).unscale_mut(n);
        }
        let sv = SVD::new(u, false, false).singular_values;
        let max = sv.max();
        let min = sv.min();
        if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        }
    }
}

/// Extends learned statistics of three users to a user of gain `rho`.
///
/// In `t = 1/rho` the mean is `a t + b t²` and the second moment
/// `V + M² = c2 t² + c3 t³ + c4 t⁴`, so `M/t` is linear and
/// `(V + M²)/t²` quadratic in `t`. The first two users fix the line, all
/// three fix the parabola, each evaluated in Lagrange form.
pub fn extrapolate_stats(
    triple: &UserStatsTriple,
    rho: f64,
    config: &FrameConfig,
    block: usize,
) -> Result<SinrStats> {
    triple.validate()?;
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::Config(format!("target gain {rho} must be positive")));
    }
    if block == 0 || block > config.num_blocks() {
        return Err(Error::BlockRange {
            start: block,
            end: block,
            blocks: config.num_blocks(),
        });
    }
    let cond = triple.condition_number();
    if !(cond <= MAX_CONDITION) {
        return Err(Error::IllConditioned(cond));
    }
    let t: Vec<f64> = triple.users.iter().map(|u| 1.0 / u.rho).collect();
    let tk = 1.0 / rho;

    let lin = |i: usize, j: usize| (tk - t[j]) / (t[i] - t[j]);
    let m_over_t = |i: usize| triple.users[i].mean / t[i];
    let mean = tk * (lin(0, 1) * m_over_t(0) + lin(1, 0) * m_over_t(1));

    let q = |i: usize| {
        let u = &triple.users[i];
        (u.variance + u.mean * u.mean) / (t[i] * t[i])
    };
    let basis = |i: usize, j: usize, k: usize| ((tk - t[j]) * (tk - t[k])) / ((t[i] - t[j]) * (t[i] - t[k]));
    let second = tk * tk * (basis(0, 1, 2) * q(0) + basis(1, 0, 2) * q(1) + basis(2, 0, 1) * q(2));

    Ok(SinrStats::new(block, mean, second - mean * mean, Provenance::Extrapolated))
}
