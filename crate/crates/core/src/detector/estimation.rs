use crate::linalg::{CMatrix, Hpd, C64};
use crate::{Error, Result};

/// MMSE estimator of the target-cell channels from `L` known symbols.
///
/// With `R = M diag(rho)` and `c = M (sum of out-of-cell rho + noise)`, the
/// estimator is `Q = X^H (X X^H + c R^-1)^-1` and the error covariance summed
/// over antennas is `E = c (X X^H + c R^-1)^-1`.
#[derive(Debug, Clone)]
pub struct InCellEstimate {
    /// `L × K` estimator.
    pub q: CMatrix,
    /// `K × K` error covariance `E[ΔH^H ΔH]`.
    pub error_cov: CMatrix,
    /// Per-antenna error variance of each column, `diag(E) / M`.
    pub delta: Vec<f64>,
    system: CMatrix,
    load: f64,
}

/// Builds the in-cell estimator for symbols `x` (`K × L`, unit power), large
/// scale gains `rho`, and `load = sum_{not in cell} rho + sigma^2/P`.
pub fn in_cell_estimator(x: &CMatrix, rho: &[f64], load: f64, antennas: usize) -> Result<InCellEstimate> {
    if x.nrows() != rho.len() {
        return Err(Error::Dimension(format!(
            "{} symbol rows for {} gains",
            x.nrows(),
            rho.len()
        )));
    }
    let m = antennas as f64;
    let mut system = x * x.adjoint();
    for (k, &r) in rho.iter().enumerate() {
        system[(k, k)] += C64::new(load / r, 0.0);
    }
    let chol = Hpd::new(system.clone(), "in-cell estimation system")?;
    let q = chol.solve(x).adjoint();
    let error_cov = chol.inverse() * C64::new(m * load, 0.0);
    let delta = (0..rho.len()).map(|k| error_cov[(k, k)].re / m).collect();
    Ok(InCellEstimate {
        q,
        error_cov,
        delta,
        system,
        load,
    })
}

/// `Ĥ = Y Q_in` for a power-normalised `Y` (`M × L`).
pub fn estimate_in_cell(
    y: &CMatrix,
    x: &CMatrix,
    rho: &[f64],
    load: f64,
) -> Result<(CMatrix, InCellEstimate)> {
    if y.ncols() != x.ncols() {
        return Err(Error::Dimension(format!(
            "Y has {} columns, X has {}",
            y.ncols(),
            x.ncols()
        )));
    }
    let est = in_cell_estimator(x, rho, load, y.nrows())?;
    Ok((y * &est.q, est))
}

/// Removes the detected target-cell signals: `Y_intf = Y - Ĥ X`.
pub fn cancel_residual(y: &CMatrix, h_hat: &CMatrix, x: &CMatrix) -> CMatrix {
    y - h_hat * x
}

/// MMSE estimator of the cooperative interferers' channels from the residual
/// `Y_intf` over `L'` symbols.
///
/// The residual noise covariance is `D = c' I + X1'^H E X1'`, where `E` is the
/// in-cell error covariance and `c' = M (sum of rho outside the cooperative
/// set + sigma^2/P)`. Then `Q_co = D^-1 X^H (X D^-1 X^H + R^-1)^-1` and the
/// error covariance is `(X D^-1 X^H + R^-1)^-1`.
#[derive(Debug, Clone)]
pub struct CooperativeEstimate {
    /// `L' × K_co` estimator.
    pub q: CMatrix,
    pub error_cov: CMatrix,
    pub delta: Vec<f64>,
}

pub fn cooperative_estimator(
    x_co: &CMatrix,
    rho_co: &[f64],
    x_in: &CMatrix,
    in_cell: &InCellEstimate,
    residual_load: f64,
    antennas: usize,
) -> Result<CooperativeEstimate> {
    if x_co.nrows() != rho_co.len() || x_co.ncols() != x_in.ncols() {
        return Err(Error::Dimension(format!(
            "cooperative symbols {}x{}, {} gains, in-cell symbols {}x{}",
            x_co.nrows(),
            x_co.ncols(),
            rho_co.len(),
            x_in.nrows(),
            x_in.ncols()
        )));
    }
    let m = antennas as f64;
    let k_co = rho_co.len();
    if k_co == 0 {
        return Ok(CooperativeEstimate {
            q: CMatrix::zeros(x_co.ncols(), 0),
            error_cov: CMatrix::zeros(0, 0),
            delta: Vec::new(),
        });
    }
    let c_in = m * in_cell.load;
    let c_co = m * residual_load;

    // W = D^-1 X_co^H via Woodbury on D = c' I + X1'^H E X1', E = c B^-1
    let f = &in_cell.system * C64::new(c_co / c_in, 0.0) + x_in * x_in.adjoint();
    let f = Hpd::new(f, "cooperative residual covariance")?;
    let x_co_h = x_co.adjoint();
    let inner = f.solve(&(x_in * &x_co_h));
    let w = (x_co_h - x_in.adjoint() * inner) * C64::new(1.0 / c_co, 0.0);

    let mut g = x_co * &w;
    for (k, &r) in rho_co.iter().enumerate() {
        g[(k, k)] += C64::new(1.0 / (m * r), 0.0);
    }
    // the product is Hermitian in exact arithmetic
    let g = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    let g = Hpd::new(g, "cooperative estimation system")?;
    let q = g.solve(&w.adjoint()).adjoint();
    let error_cov = g.inverse();
    let delta = (0..k_co).map(|k| error_cov[(k, k)].re / m).collect();
    Ok(CooperativeEstimate { q, error_cov, delta })
}

/// `Ĥ_intf = Y_intf Q_co`.
pub fn estimate_interferers(
    y_intf: &CMatrix,
    x_co: &CMatrix,
    rho_co: &[f64],
    x_in: &CMatrix,
    in_cell: &InCellEstimate,
    residual_load: f64,
) -> Result<(CMatrix, CooperativeEstimate)> {
    let est = cooperative_estimator(x_co, rho_co, x_in, in_cell, residual_load, y_intf.nrows())?;
    Ok((y_intf * &est.q, est))
}
