//! Dense complex linear algebra used by every other module.
//!
//! Matrices are nalgebra `DMatrix<Complex<f64>>`; the SVD and the Hermitian
//! eigensolver run through faer. The single rank policy lives in [`Tolerance`]:
//! a singular value counts as nonzero when it exceeds
//! `rank_tol_factor * max(rows, cols) * sigma_max`.

use faer::{Mat, Side};
use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Dense complex matrix. Real inputs are embedded with zero imaginary parts.
pub type Matrix = DMatrix<C64>;

/// Rank cutoff and comparison slack shared by the whole library.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Relative singular-value cutoff, scaled by `max(rows, cols) * sigma_max`.
    pub rank_tol_factor: f64,
    /// Absolute slack for inequality checks.
    pub cmp_tol: f64,
    /// A principal cosine at or above `1 - intersection_tol` is an intersection direction.
    pub intersection_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rank_tol_factor: f64::EPSILON,
            cmp_tol: 1e-8,
            intersection_tol: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(rank_tol_factor: f64, cmp_tol: f64, intersection_tol: f64) -> Result<Self> {
        for (name, v) in [
            ("rank_tol_factor", rank_tol_factor),
            ("cmp_tol", cmp_tol),
            ("intersection_tol", intersection_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if rank_tol_factor >= 1e-2 {
            return Err(Error::InvalidInput(format!(
                "rank_tol_factor must be much smaller than 1, got {rank_tol_factor}"
            )));
        }
        Ok(Self {
            rank_tol_factor,
            cmp_tol,
            intersection_tol,
        })
    }

    pub fn with_cmp_tol(mut self, cmp_tol: f64) -> Self {
        self.cmp_tol = cmp_tol;
        self
    }

    /// Absolute singular-value cutoff for a `rows x cols` matrix with largest singular value `sigma_max`.
    pub fn rank_cutoff(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        self.rank_tol_factor * rows.max(cols) as f64 * sigma_max
    }
}

pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Builds a complex matrix from real row-major data.
pub fn real_matrix(rows: usize, cols: usize, row_major: &[f64]) -> Matrix {
    assert_eq!(
        row_major.len(),
        rows * cols,
        "row-major data has wrong length"
    );
    Matrix::from_fn(rows, cols, |i, j| c64(row_major[i * cols + j], 0.0))
}

pub fn diagonal(values: &[f64]) -> Matrix {
    let n = values.len();
    Matrix::from_fn(n, n, |i, j| {
        if i == j {
            c64(values[i], 0.0)
        } else {
            C64::default()
        }
    })
}

pub fn identity(n: usize) -> Matrix {
    Matrix::identity(n, n)
}

pub fn check_finite(m: &Matrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Thin SVD `M = U diag(sigma) V*` with singular values sorted descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    pub v: Matrix,
}

impl Svd {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values above the rank cutoff.
    pub fn rank(&self, rows: usize, cols: usize, tol: &Tolerance) -> usize {
        let smax = self.sigma_max();
        if smax <= 0.0 {
            return 0;
        }
        let cutoff = tol.rank_cutoff(rows, cols, smax);
        self.singular_values.iter().filter(|&&s| s > cutoff).count()
    }
}

pub fn svd(m: &Matrix) -> Result<Svd> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(Svd {
            u: Matrix::zeros(rows, 0),
            singular_values: Vec::new(),
            v: Matrix::zeros(cols, 0),
        });
    }
    check_finite(m)?;
    let dec = to_faer(m)
        .thin_svd()
        .map_err(|e| Error::Computation(format!("SVD of {rows}x{cols} matrix: {e:?}")))?;
    let k = rows.min(cols);
    let s = dec.S().column_vector();
    let sv: Vec<f64> = (0..k).map(|i| s[i].re).collect();

    // faer already sorts descending; keep the order explicit anyway
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let (fu, fv) = (dec.U(), dec.V());
    Ok(Svd {
        u: Matrix::from_fn(rows, k, |i, j| fu[(i, order[j])]),
        singular_values: order.iter().map(|&j| sv[j]).collect(),
        v: Matrix::from_fn(cols, k, |i, j| fv[(i, order[j])]),
    })
}

fn to_faer(m: &Matrix) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Singular values only, sorted descending.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(Vec::new());
    }
    check_finite(m)?;
    let mut sv = to_faer(m)
        .singular_values()
        .map_err(|e| Error::Computation(format!("SVD of {rows}x{cols} matrix: {e:?}")))?;
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

pub fn numerical_rank(m: &Matrix, tol: &Tolerance) -> Result<usize> {
    let sv = singular_values(m)?;
    Ok(rank_of(&sv, m.nrows(), m.ncols(), tol))
}

fn rank_of(sv: &[f64], rows: usize, cols: usize, tol: &Tolerance) -> usize {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax <= 0.0 {
        return 0;
    }
    let cutoff = tol.rank_cutoff(rows, cols, smax);
    sv.iter().filter(|&&s| s > cutoff).count()
}

/// Moore-Penrose pseudoinverse with the rank decided by [`numerical_rank`].
pub fn pinv(m: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    let (rows, cols) = m.shape();
    let dec = svd(m)?;
    let r = dec.rank(rows, cols, tol);
    let mut out = Matrix::zeros(cols, rows);
    for k in 0..r {
        let inv = 1.0 / dec.singular_values[k];
        let vk = dec.v.column(k);
        let uk = dec.u.column(k);
        out += (vk * uk.adjoint()) * c64(inv, 0.0);
    }
    Ok(out)
}

/// Reduced minimum modulus: the smallest singular value above the rank
/// cutoff. The zero operator has an empty orthogonal complement of its
/// kernel, so its infimum is `+inf`.
pub fn gamma(m: &Matrix, tol: &Tolerance) -> Result<f64> {
    let sv = singular_values(m)?;
    let r = rank_of(&sv, m.nrows(), m.ncols(), tol);
    Ok(if r == 0 { f64::INFINITY } else { sv[r - 1] })
}

pub fn operator_norm(m: &Matrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// Orthonormal basis of the column space.
pub fn range_basis(m: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    let dec = svd(m)?;
    let r = dec.rank(m.nrows(), m.ncols(), tol);
    Ok(dec.u.columns(0, r).into_owned())
}

/// Orthonormal basis of the null space `{x : Mx = 0}`.
pub fn null_space(m: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    if rows == 0 {
        return Ok(identity(cols));
    }
    // zero rows pad a wide matrix so the thin SVD yields a full right basis
    let padded = if rows < cols {
        let mut p = Matrix::zeros(cols, cols);
        p.rows_mut(0, rows).copy_from(m);
        p
    } else {
        m.clone()
    };
    let dec = svd(&padded)?;
    let r = dec.rank(rows, cols, tol);
    Ok(dec.v.columns(r, cols - r).into_owned())
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

pub fn hermitian_eigen(m: &Matrix) -> Result<HermitianEigen> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch {
            context: "hermitian_eigen",
            expected: n,
            actual: m.ncols(),
        });
    }
    if n == 0 {
        return Ok(HermitianEigen {
            eigenvalues: Vec::new(),
            eigenvectors: Matrix::zeros(0, 0),
        });
    }
    check_finite(m)?;
    let sym = (m + m.adjoint()) * c64(0.5, 0.0);
    let dec = to_faer(&sym).self_adjoint_eigen(Side::Lower).map_err(|e| {
        Error::Computation(format!("Hermitian eigensolver on {n}x{n} matrix: {e:?}"))
    })?;
    let s = dec.S().column_vector();
    let vals: Vec<f64> = (0..n).map(|i| s[i].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let u = dec.U();
    Ok(HermitianEigen {
        eigenvalues: order.iter().map(|&k| vals[k]).collect(),
        eigenvectors: Matrix::from_fn(n, n, |i, j| u[(i, order[j])]),
    })
}

/// Fails unless `a` is square, Hermitian and has no eigenvalue below
/// `-cmp_tol * max(1, ||A||)`.
pub fn check_psd(a: &Matrix, tol: &Tolerance) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotPositiveSemidefinite(format!(
            "{}x{} matrix is not square",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = operator_norm(a)?.max(1.0);
    let skew = operator_norm(&(a - a.adjoint()))?;
    if skew > tol.cmp_tol * scale {
        return Err(Error::NotPositiveSemidefinite(format!(
            "||A - A*|| = {skew:e}"
        )));
    }
    let eig = hermitian_eigen(a)?;
    if let Some(&lmin) = eig.eigenvalues.first() {
        if lmin < -tol.cmp_tol * scale {
            return Err(Error::NotPositiveSemidefinite(format!(
                "eigenvalue {lmin:e} is negative"
            )));
        }
    }
    Ok(())
}

/// Principal square root of a Hermitian PSD matrix. Eigenvalues at or below
/// the rank cutoff of `a` are set to zero, so the root has the same kernel;
/// otherwise rounding noise of size `eps` would turn into roots of size `sqrt(eps)`.
pub fn psd_sqrt(a: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    let eig = hermitian_eigen(a)?;
    let n = a.nrows();
    let lmax = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let cutoff = tol.rank_cutoff(n, n, lmax);
    let v = &eig.eigenvectors;
    let roots = Matrix::from_fn(n, n, |i, j| {
        let l = eig.eigenvalues[i];
        if i == j && l > cutoff {
            c64(l.sqrt(), 0.0)
        } else {
            C64::default()
        }
    });
    let root = v * roots * v.adjoint();
    Ok((&root + root.adjoint()) * c64(0.5, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(rows, cols, |_, _| {
            c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn fro(m: &Matrix) -> f64 {
        m.norm()
    }

    #[test]
    fn svd_basic_cases() {
        let s = svd(&identity(3)).unwrap();
        assert_eq!(s.singular_values, vec![1.0, 1.0, 1.0]);
        let s = svd(&diagonal(&[3.0, 2.0, 0.0])).unwrap();
        for (got, want) in s.singular_values.iter().zip([3.0, 2.0, 0.0]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn svd_reconstructs_random_matrix() {
        let m = random_matrix(5, 3, 11);
        let s = svd(&m).unwrap();
        let sigma = Matrix::from_fn(3, 3, |i, j| {
            if i == j {
                c64(s.singular_values[i], 0.0)
            } else {
                C64::default()
            }
        });
        let rec = &s.u * sigma * s.v.adjoint();
        let norm = operator_norm(&m).unwrap();
        assert!(operator_norm(&(&m - rec)).unwrap() <= 1e-12 * norm);
        assert!(fro(&(s.u.adjoint() * &s.u - identity(3))) < 1e-12);
        assert!(fro(&(s.v.adjoint() * &s.v - identity(3))) < 1e-12);
        assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rank_cases() {
        let tol = Tolerance::default();
        assert_eq!(numerical_rank(&Matrix::zeros(4, 4), &tol).unwrap(), 0);
        assert_eq!(
            numerical_rank(&diagonal(&[1.0, 1e-30, 0.0]), &tol).unwrap(),
            1
        );

        let q = range_basis(&random_matrix(5, 2, 3), &tol).unwrap();
        let p = &q * q.adjoint();
        // eigenvalue-count oracle: eigenvalues of a projector are 0 or 1
        let eig = hermitian_eigen(&p).unwrap();
        let ones = eig.eigenvalues.iter().filter(|&&l| l > 0.5).count();
        assert_eq!(ones, 2);
        assert_eq!(numerical_rank(&p, &tol).unwrap(), ones);
    }

    #[test]
    fn pinv_cases() {
        let tol = Tolerance::default();
        let id = pinv(&identity(3), &tol).unwrap();
        assert!(fro(&(id - identity(3))) < 1e-15);
        let d = pinv(&diagonal(&[2.0, 0.0]), &tol).unwrap();
        assert!(fro(&(d - diagonal(&[0.5, 0.0]))) < 1e-15);

        let m = random_matrix(4, 2, 5) * random_matrix(2, 4, 6);
        let mp = pinv(&m, &tol).unwrap();
        let norm = operator_norm(&m).unwrap();
        assert!(operator_norm(&(&m * &mp * &m - &m)).unwrap() <= 1e-9 * norm);
        assert!(
            operator_norm(&(&mp * &m * &mp - &mp)).unwrap() <= 1e-9 * operator_norm(&mp).unwrap()
        );
        let mmp = &m * &mp;
        assert!(operator_norm(&(&mmp - mmp.adjoint())).unwrap() <= 1e-9);
        let mpm = &mp * &m;
        assert!(operator_norm(&(&mpm - mpm.adjoint())).unwrap() <= 1e-9);
    }

    #[test]
    fn gamma_cases() {
        let tol = Tolerance::default();
        assert!((gamma(&identity(4), &tol).unwrap() - 1.0).abs() < 1e-15);
        assert!((gamma(&diagonal(&[3.0, 2.0, 0.0]), &tol).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(gamma(&Matrix::zeros(3, 3), &tol).unwrap(), f64::INFINITY);
        assert_eq!(gamma(&Matrix::zeros(0, 3), &tol).unwrap(), f64::INFINITY);
    }

    #[test]
    fn operator_norm_cases() {
        assert_eq!(operator_norm(&identity(3)).unwrap(), 1.0);
        assert!((operator_norm(&diagonal(&[3.0, 2.0, 0.0])).unwrap() - 3.0).abs() < 1e-15);
        let q = nalgebra::linalg::QR::new(random_matrix(6, 6, 9)).q();
        assert!((operator_norm(&q).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(operator_norm(&Matrix::zeros(0, 0)).unwrap(), 0.0);
    }

    #[test]
    fn null_space_wide_and_tall() {
        let tol = Tolerance::default();
        let wide = random_matrix(2, 5, 21);
        let ns = null_space(&wide, &tol).unwrap();
        assert_eq!(ns.ncols(), 3);
        assert!(operator_norm(&(&wide * &ns)).unwrap() < 1e-12);
        let tall = diagonal(&[1.0, 0.0, 2.0]);
        let ns = null_space(&tall, &tol).unwrap();
        assert_eq!(ns.ncols(), 1);
        assert!((ns[(1, 0)].norm() - 1.0).abs() < 1e-12);
        assert_eq!(null_space(&Matrix::zeros(0, 4), &tol).unwrap().ncols(), 4);
    }

    #[test]
    fn psd_helpers() {
        let tol = Tolerance::default();
        let b = random_matrix(4, 4, 2);
        let a = &b * b.adjoint();
        check_psd(&a, &tol).unwrap();
        let r = psd_sqrt(&a, &tol).unwrap();
        assert!(operator_norm(&(&r * &r - &a)).unwrap() < 1e-10 * operator_norm(&a).unwrap());

        // rank-deficient: the root keeps the kernel, gamma(A^(1/2)) = sqrt(smallest nonzero eigenvalue)
        let q = svd(&random_matrix(5, 5, 9)).unwrap().u;
        let a = &q * diagonal(&[0.0, 0.0, 0.5, 1.0, 2.0]) * q.adjoint();
        let r = psd_sqrt(&a, &tol).unwrap();
        assert_eq!(numerical_rank(&r, &tol).unwrap(), 3);
        assert!((gamma(&r, &tol).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(check_psd(&diagonal(&[1.0, -1.0]), &tol).is_err());
        assert!(check_psd(&random_matrix(3, 3, 1), &tol).is_err());
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(0.0, 1e-8, 1e-8).is_err());
        assert!(Tolerance::new(1e-15, -1.0, 1e-8).is_err());
        assert!(Tolerance::new(0.5, 1e-8, 1e-8).is_err());
        assert!(Tolerance::new(1e-15, 1e-8, 1e-8).is_ok());
    }

    #[test]
    fn non_finite_rejected() {
        let mut m = identity(2);
        m[(1, 0)] = c64(f64::NAN, 0.0);
        assert_eq!(svd(&m).unwrap_err(), Error::NonFinite { row: 1, col: 0 });
    }
}
