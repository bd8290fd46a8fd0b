//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uplink_adapt::geometry::{DropSettings, SamplingWindow};
use uplink_adapt::linalg::{complex_normal_matrix, real_diagonal, CMatrix, C64};

pub const TOL: f64 = 1e-12;

pub fn inv(m: &CMatrix) -> CMatrix {
    m.clone().lu().try_inverse().expect("invertible")
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn scaled(m: CMatrix, s: f64) -> CMatrix {
    m * C64::new(s, 0.0)
}

pub struct Instance {
    pub m: usize,
    pub x_in: CMatrix,
    pub rho_in: Vec<f64>,
    pub load: f64,
    pub x_co: CMatrix,
    pub rho_co: Vec<f64>,
    pub residual_load: f64,
    pub len_co: usize,
}

pub fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(1..=4);
    let k_in = rng.random_range(1..=3);
    let k_co = rng.random_range(1..=3);
    let len = rng.random_range(3..=7);
    let len_co = rng.random_range(2..=len);
    let rho_in = (0..k_in).map(|_| rng.random_range(0.2..2.0)).collect();
    let rho_co = (0..k_co).map(|_| rng.random_range(0.05..1.0)).collect();
    Instance {
        m,
        x_in: complex_normal_matrix(&mut rng, k_in, len, 1.0),
        rho_in,
        load: rng.random_range(0.1..1.0),
        x_co: complex_normal_matrix(&mut rng, k_co, len_co, 1.0),
        rho_co,
        residual_load: rng.random_range(0.05..0.5),
        len_co,
    }
}

/// `[X^H R X + c I]^-1 X^H R` with `R = M diag(rho)` and `c = M load`.
pub fn q_in_direct(x: &CMatrix, rho: &[f64], load: f64, m: usize) -> CMatrix {
    let r = scaled(real_diagonal(rho), m as f64);
    let l = x.ncols();
    let a = x.adjoint() * &r * x + scaled(identity(l), m as f64 * load);
    inv(&a) * x.adjoint() * r
}

/// Posterior covariance `R - R X (X^H R X + c I)^-1 X^H R`, summed over antennas.
pub fn e_in_direct(x: &CMatrix, rho: &[f64], load: f64, m: usize) -> CMatrix {
    let r = scaled(real_diagonal(rho), m as f64);
    let l = x.ncols();
    let a = x.adjoint() * &r * x + scaled(identity(l), m as f64 * load);
    &r - &r * x * inv(&a) * x.adjoint() * &r
}

/// Cooperative estimator `[X^H R X + D]^-1 X^H R` and its error covariance
/// `(R^-1 + X D^-1 X^H)^-1`, with `D = X1^H E X1 + c' I` built from the
/// in-cell error covariance `E`.
pub fn co_direct(t: &Instance, e_in: &CMatrix) -> (CMatrix, CMatrix) {
    let m = t.m as f64;
    let x1 = t.x_in.columns(0, t.len_co).into_owned();
    let r_co = scaled(real_diagonal(&t.rho_co), m);
    let d = x1.adjoint() * e_in * &x1 + scaled(identity(t.len_co), m * t.residual_load);
    let a = t.x_co.adjoint() * &r_co * &t.x_co + &d;
    let q = inv(&a) * t.x_co.adjoint() * &r_co;
    let e = inv(&(inv(&r_co) + &t.x_co * inv(&d) * t.x_co.adjoint()));
    (q, e)
}

pub fn estimates(seed: u64, m: usize, k: usize) -> (CMatrix, CMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let var = rng.random_range(0.1..2.0);
    let h = complex_normal_matrix(&mut rng, m, k, var);
    let y = complex_normal_matrix(&mut rng, m, 5, 1.0);
    (h, y)
}

pub fn settings(limit: usize) -> DropSettings {
    DropSettings {
        pathloss_exponent: 3.76,
        shadowing_db: 3.0,
        max_users_per_cell: limit,
        window: SamplingWindow::BoundingDisk,
    }
}

pub struct Moments {
    n: f64,
    sum: f64,
    sum2: f64,
    sum4: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        Moments {
            n,
            sum: values.iter().sum(),
            sum2: values.iter().map(|v| (v - mean).powi(2)).sum(),
            sum4: values.iter().map(|v| (v - mean).powi(4)).sum(),
        }
    }
    pub fn mean(&self) -> f64 {
        self.sum / self.n
    }
    pub fn var(&self) -> f64 {
        self.sum2 / (self.n - 1.0)
    }
    pub fn mean_se(&self) -> f64 {
        (self.var() / self.n).sqrt()
    }
    /// Standard error of the sample variance from the fourth central moment.
    pub fn var_se(&self) -> f64 {
        let m4 = self.sum4 / self.n;
        let v = self.sum2 / self.n;
        ((m4 - v * v) / self.n).sqrt()
    }
}

