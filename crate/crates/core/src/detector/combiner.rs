use crate::linalg::{mul_adjoint_left, CMatrix, CVector, Hpd, C64};
use crate::{Error, Result};

/// MMSE combiner `Ψ = (Ĥ Ĥ^H + α I)^-1` for a stacked estimate `Ĥ` (`M × K`).
///
/// Everything is evaluated through the `K × K` matrix `A = Ĥ^H Ĥ + α I`:
/// the detector is `S = Ĥ^H Ψ = A^-1 Ĥ^H` and
/// `Ψ = α^-1 (I - Ĥ A^-1 Ĥ^H)`.
pub struct Combiner {
    h: CMatrix,
    alpha: f64,
    gram: CMatrix,
    system: Hpd,
}

/// Combining vector `w = Ψ ĥ_t` of one user in reduced form.
#[derive(Debug, Clone)]
pub struct TargetWeights {
    /// `Ĥ^H w`; entry `k` is `ĥ_k^H Ψ ĥ_t`.
    pub p: CVector,
    /// `‖w‖²`.
    pub w_norm_sqr: f64,
    /// Coefficients with `w = Ĥ s`.
    pub s: CVector,
}

/// Scalar loading of the in-cell combiner:
/// `(sum of rho outside the cell + sum of in-cell error variances) + sigma^2/P`.
pub fn alpha_in(outside_cell: f64, delta_in: &[f64], noise: f64) -> f64 {
    (outside_cell + delta_in.iter().sum::<f64>()) + noise
}

/// Scalar loading of the cooperative combiner. With no cooperative users it
/// equals [`alpha_in`] bit for bit.
pub fn alpha_co(outside_coop: f64, delta_in: &[f64], delta_co: &[f64], noise: f64) -> f64 {
    ((outside_coop + delta_in.iter().sum::<f64>()) + delta_co.iter().sum::<f64>()) + noise
}

impl Combiner {
    pub fn new(h: CMatrix, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::NotPositiveDefinite("combiner loading"));
        }
        let gram = mul_adjoint_left(&h.as_view(), &h.as_view());
        let mut a = gram.clone();
        for k in 0..a.nrows() {
            a[(k, k)] += C64::new(alpha, 0.0);
        }
        let system = Hpd::new(a, "combiner system")?;
        Ok(Combiner {
            h,
            alpha,
            gram,
            system,
        })
    }

    pub fn estimates(&self) -> &CMatrix {
        &self.h
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Detection matrix `S = Ĥ^H Ψ` (`K × M`).
    pub fn detector_rows(&self) -> CMatrix {
        self.system.solve(&self.h.adjoint())
    }

    /// Dense `M × M` matrix `Ψ`.
    pub fn psi(&self) -> CMatrix {
        let m = self.h.nrows();
        let inner = &self.h * self.system.solve(&self.h.adjoint());
        (CMatrix::identity(m, m) - inner) * C64::new(1.0 / self.alpha, 0.0)
    }

    /// Combining vector of estimate column `t`.
    pub fn target_weights(&self, t: usize) -> TargetWeights {
        let mut e = CVector::zeros(self.h.ncols());
        e[t] = C64::new(1.0, 0.0);
        let s = self.system.solve_vec(&e);
        let p = &self.gram * &s;
        let w_norm_sqr = s.dotc(&p).re.max(0.0);
        TargetWeights { p, w_norm_sqr, s }
    }
}

fn check_block(h: &CMatrix, y: &CMatrix) -> Result<()> {
    if h.nrows() != y.nrows() {
        return Err(Error::Dimension(format!(
            "estimates have {} rows, received block {}",
            h.nrows(),
            y.nrows()
        )));
    }
    Ok(())
}

/// Detects the target-cell symbols of one block with `Ψ_in`.
pub fn detect_block_in(
    h_in: &CMatrix,
    delta_in: &[f64],
    outside_cell: f64,
    noise: f64,
    y_block: &CMatrix,
) -> Result<(CMatrix, Combiner)> {
    check_block(h_in, y_block)?;
    let comb = Combiner::new(h_in.clone(), alpha_in(outside_cell, delta_in, noise))?;
    Ok((comb.detector_rows() * y_block, comb))
}

/// Detects the target-cell symbols of one block with `Ψ_co`, built from the
/// stacked estimate `[Ĥ_in, Ĥ_intf]`. Only the target-cell rows are returned.
pub fn detect_block_co(
    h_in: &CMatrix,
    h_intf: &CMatrix,
    delta_in: &[f64],
    delta_co: &[f64],
    outside_coop: f64,
    noise: f64,
    y_block: &CMatrix,
) -> Result<(CMatrix, Combiner)> {
    check_block(h_in, y_block)?;
    if h_intf.nrows() != h_in.nrows() {
        return Err(Error::Dimension("cooperative estimates have the wrong row count".into()));
    }
    let k = h_in.ncols();
    let mut stacked = CMatrix::zeros(h_in.nrows(), k + h_intf.ncols());
    stacked.columns_mut(0, k).copy_from(h_in);
    stacked.columns_mut(k, h_intf.ncols()).copy_from(h_intf);
    let comb = Combiner::new(
        stacked,
        alpha_co(outside_coop, delta_in, delta_co, noise),
    )?;
    let rows = comb.detector_rows();
    Ok((rows.rows(0, k) * y_block, comb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{complex_normal_matrix, hermitian_defect, min_eigenvalue, relative_distance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn woodbury_forms_agree_with_direct_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = complex_normal_matrix(&mut rng, 6, 3, 1.0);
        let comb = Combiner::new(h.clone(), 0.7).unwrap();
        let direct = (&h * h.adjoint() + CMatrix::identity(6, 6) * C64::new(0.7, 0.0))
            .try_inverse()
            .unwrap();
        assert!(relative_distance(&comb.psi(), &direct) < 1e-12);
        assert!(relative_distance(&comb.detector_rows(), &(h.adjoint() * &direct)) < 1e-12);
        let tw = comb.target_weights(1);
        let w = &direct * h.column(1);
        assert!((tw.w_norm_sqr - w.norm_squared()).abs() < 1e-12 * w.norm_squared());
        let p = h.adjoint() * &w;
        assert!((&tw.p - p).norm() < 1e-12);
        assert!(hermitian_defect(&comb.psi()) < 1e-12);
        assert!(min_eigenvalue(&comb.psi()) > 0.0);
    }

    #[test]
    fn zero_estimate_detects_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let y = complex_normal_matrix(&mut rng, 4, 5, 1.0);
        let (x, _) = detect_block_in(&CMatrix::zeros(4, 2), &[0.1, 0.1], 1.0, 0.01, &y).unwrap();
        assert!(x.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn empty_cooperation_is_bit_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = complex_normal_matrix(&mut rng, 5, 2, 1.0);
        let y = complex_normal_matrix(&mut rng, 5, 3, 1.0);
        let delta = [0.013, 0.021];
        let (xa, a) = detect_block_in(&h, &delta, 0.37, 1e-3, &y).unwrap();
        let (xb, b) =
            detect_block_co(&h, &CMatrix::zeros(5, 0), &delta, &[], 0.37, 1e-3, &y).unwrap();
        assert_eq!(a.psi(), b.psi());
        assert_eq!(xa, xb);
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let y = CMatrix::zeros(3, 2);
        assert!(detect_block_in(&CMatrix::zeros(4, 1), &[0.1], 1.0, 0.1, &y).is_err());
    }
}
