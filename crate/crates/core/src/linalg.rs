//! Complex dense linear algebra helpers shared by the detector and learning
//! modules. Every inverse in the production path is a Cholesky solve.

use matrixmultiply::CGemmOption;
use nalgebra::{Cholesky, DMatrix, DMatrixView, DVector, Dyn};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);

/// Cholesky factor of a Hermitian positive definite matrix.
pub struct Hpd {
    chol: Cholesky<C64, Dyn>,
}

impl Hpd {
    pub fn new(a: CMatrix, what: &'static str) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "{what}: {}x{} is not square",
                a.nrows(),
                a.ncols()
            )));
        }
        let chol = Cholesky::new(a).ok_or(Error::NotPositiveDefinite(what))?;
        // complex square roots of negative pivots succeed, so check the pivots
        let l = chol.l_dirty();
        let positive = (0..l.nrows()).all(|i| {
            let d = l[(i, i)];
            d.re > 0.0 && d.re.is_finite() && d.im.abs() <= 1e-9 * d.re
        });
        if !positive {
            return Err(Error::NotPositiveDefinite(what));
        }
        Ok(Hpd { chol })
    }

    pub fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        self.chol.solve(b)
    }

    pub fn solve_vec(&self, b: &CVector) -> CVector {
        self.chol.solve(b)
    }

    pub fn inverse(&self) -> CMatrix {
        self.chol.inverse()
    }
}

fn gemm(a: &DMatrixView<C64>, transpose_a: bool, b: &DMatrixView<C64>) -> CMatrix {
    let (ar, ac) = a.shape();
    let (rs, cs) = a.strides();
    let (m, k, rsa, csa) = if transpose_a {
        (ac, ar, cs as isize, rs as isize)
    } else {
        (ar, ac, rs as isize, cs as isize)
    };
    assert_eq!(k, b.nrows(), "inner dimensions differ");
    let n = b.ncols();
    let mut c = CMatrix::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    let (rsb, csb) = b.strides();
    // SAFETY: Complex64 is repr(C) with layout [re, im]; the pointers and
    // strides describe the in-bounds storage of `a`, `b` and the fresh
    // column-major `c`.
    unsafe {
        matrixmultiply::zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            rsa,
            csa,
            b.as_ptr() as *const [f64; 2],
            rsb as isize,
            csb as isize,
            [0.0, 0.0],
            c.as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
    c
}

/// `A B` through a blocked complex GEMM.
pub fn mul(a: &DMatrixView<C64>, b: &DMatrixView<C64>) -> CMatrix {
    gemm(a, false, b)
}

/// `A^H B` through a blocked complex GEMM.
pub fn mul_adjoint_left(a: &DMatrixView<C64>, b: &DMatrixView<C64>) -> CMatrix {
    let conj = a.map(|z| z.conj());
    gemm(&conj.as_view(), true, b)
}

/// Draws one circularly-symmetric complex Gaussian sample of the given variance.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let s = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(s * re, s * im)
}

/// Matrix of i.i.d. CN(0, variance) entries, filled column by column.
pub fn complex_normal_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    variance: f64,
) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for c in 0..cols {
        for r in 0..rows {
            m[(r, c)] = complex_normal(rng, variance);
        }
    }
    m
}

/// `diag(d)` as a complex matrix.
pub fn real_diagonal(d: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        d.len(),
        d.iter().map(|&v| C64::new(v, 0.0)),
    ))
}

/// Scales column `j` of `m` by `s[j]`.
pub fn scale_columns(m: &mut CMatrix, s: &[f64]) {
    for (j, &v) in s.iter().enumerate() {
        m.column_mut(j).scale_mut(v);
    }
}

/// Scales row `i` of `m` by `s[i]`.
pub fn scale_rows(m: &mut CMatrix, s: &[f64]) {
    for (i, &v) in s.iter().enumerate() {
        m.row_mut(i).scale_mut(v);
    }
}

/// Copies the listed rows of `m` into a new matrix, keeping the first `cols` columns.
pub fn select_rows(m: &CMatrix, rows: &[usize], cols: usize) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols, |r, c| m[(rows[r], c)])
}

/// Squared Frobenius/Euclidean norm.
pub fn norm_sqr(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Largest entrywise deviation from Hermitian symmetry relative to the largest entry.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst / scale
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Relative Frobenius distance `|a - b| / max(|a|, |b|)`.
pub fn relative_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = (a - b).norm();
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}
