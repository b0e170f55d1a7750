//! Reference computations for the integration tests.
//!
//! Nothing here calls the library's decompositions or angle routines:
//! singular values come from a one-sided Jacobi sweep on the real embedding
//! of a complex matrix, and bases come from pivoted Gram-Schmidt.
#![allow(dead_code)]

use fusionframe::numerics::{c64, Matrix, C64};
use fusionframe::Subspace;

/// Singular values of `m`, descending, `min(rows, cols)` of them.
pub fn svals(m: &Matrix) -> Vec<f64> {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Vec::new();
    }
    // [[Re, -Im], [Im, Re]] has every singular value of m twice
    let tall = r >= c;
    let (rows, cols) = if tall { (r, c) } else { (c, r) };
    let at = |i: usize, j: usize| if tall { m[(i, j)] } else { m[(j, i)].conj() };
    let mut a: Vec<Vec<f64>> = (0..2 * cols)
        .map(|j| {
            (0..2 * rows)
                .map(|i| {
                    let z = at(i % rows, j % cols);
                    match (i < rows, j < cols) {
                        (true, true) | (false, false) => z.re,
                        (true, false) => -z.im,
                        (false, true) => z.im,
                    }
                })
                .collect()
        })
        .collect();
    jacobi_columns(&mut a);
    let mut norms: Vec<f64> = a
        .iter()
        .map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    norms.sort_by(|x, y| y.total_cmp(x));
    norms.into_iter().step_by(2).take(k).collect()
}

// Hestenes one-sided Jacobi: rotate column pairs until all are orthogonal
fn jacobi_columns(a: &mut [Vec<f64>]) {
    let n = a.len();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = a[p]
                    .iter()
                    .zip(&a[q])
                    .fold((0.0, 0.0, 0.0), |(x, y, z), (u, v)| {
                        (x + u * u, y + v * v, z + u * v)
                    });
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let (left, right) = a.split_at_mut(q);
                for (u, v) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (x, y) = (*u, *v);
                    *u = cs * x - sn * y;
                    *v = sn * x + cs * y;
                }
            }
        }
        if !rotated {
            return;
        }
    }
    panic!("Jacobi sweep did not converge");
}

pub fn norm2(m: &Matrix) -> f64 {
    svals(m).first().copied().unwrap_or(0.0)
}

/// Smallest of the leading `rank` singular values (`+inf` when `rank == 0`).
pub fn gamma_with_rank(m: &Matrix, rank: usize) -> f64 {
    if rank == 0 {
        return f64::INFINITY;
    }
    svals(m)[rank - 1]
}

/// Smallest singular value above `rel * sigma_max`.
pub fn gamma_rel(m: &Matrix, rel: f64) -> f64 {
    let sv = svals(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    sv.iter()
        .copied()
        .rfind(|&s| s > rel * smax && s > 0.0)
        .unwrap_or(f64::INFINITY)
}

/// Orthonormal basis of the column span by pivoted modified Gram-Schmidt,
/// stopping when every residual is below `rel_tol` times the largest input column.
pub fn orth(cols: &Matrix, rel_tol: f64) -> Matrix {
    let scale = (0..cols.ncols())
        .map(|j| cols.column(j).norm())
        .fold(0.0, f64::max);
    orth_abs(cols, rel_tol * scale)
}

/// As [`orth`], with an absolute residual threshold.
pub fn orth_abs(cols: &Matrix, threshold: f64) -> Matrix {
    let n = cols.nrows();
    let mut res = cols.clone();
    let mut basis: Vec<nalgebra::DVector<C64>> = Vec::new();
    loop {
        let best = (0..res.ncols())
            .map(|j| (j, res.column(j).norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1));
        let Some((j, nj)) = best else { break };
        if nj <= threshold || nj == 0.0 || basis.len() == n {
            break;
        }
        let mut q = res.column(j).into_owned();
        for b in &basis {
            let coef = b.dotc(&q);
            q -= b * coef;
        }
        let qn = q.norm();
        q /= c64(qn, 0.0);
        for k in 0..res.ncols() {
            let coef = q.dotc(&res.column(k));
            let upd = &q * coef;
            let mut col = res.column_mut(k);
            col -= upd;
        }
        basis.push(q);
    }
    if basis.is_empty() {
        return Matrix::zeros(n, 0);
    }
    Matrix::from_columns(&basis)
}

/// Basis of exactly `expect` vectors spanning the columns.
pub fn orth_rank(cols: &Matrix, expect: usize) -> Matrix {
    let q = orth(cols, 1e-9);
    assert_eq!(
        q.ncols(),
        expect,
        "generator rank differs from the construction"
    );
    q
}

/// Orthonormal basis of the orthogonal complement of the orthonormal columns `q`.
pub fn complement(q: &Matrix) -> Matrix {
    let n = q.nrows();
    let proj = Matrix::identity(n, n) - q * q.adjoint();
    let twice = &proj * &proj;
    let c = orth_abs(&twice, 1e-8);
    assert_eq!(
        c.ncols(),
        n - q.ncols(),
        "complement has the wrong dimension"
    );
    c
}

/// Cosines of the principal angles between two orthonormal bases.
pub fn principal_cosines(qm: &Matrix, qn: &Matrix) -> Vec<f64> {
    svals(&(qm.adjoint() * qn))
        .into_iter()
        .map(|s| s.min(1.0))
        .collect()
}

pub fn dixmier(qm: &Matrix, qn: &Matrix) -> f64 {
    principal_cosines(qm, qn).first().copied().unwrap_or(0.0)
}

/// Cosine of the first principal angle that is not zero.
pub fn friedrichs(qm: &Matrix, qn: &Matrix, itol: f64) -> f64 {
    principal_cosines(qm, qn)
        .into_iter()
        .find(|&s| s < 1.0 - itol)
        .unwrap_or(0.0)
}

/// `sup_{x in M, |x| = 1} dist(x, N)`.
pub fn gap(qm: &Matrix, qn: &Matrix) -> f64 {
    if qm.ncols() == 0 {
        return 0.0;
    }
    norm2(&(qm - qn * (qn.adjoint() * qm)))
}

pub fn defect(q: &Matrix) -> f64 {
    let k = q.ncols();
    (q.adjoint() * q - Matrix::identity(k, k)).norm()
}

pub fn basis(s: &Subspace) -> Matrix {
    s.basis().clone()
}

/// Horizontal concatenation.
pub fn hcat(parts: &[&Matrix]) -> Matrix {
    let rows = parts.first().map_or(0, |m| m.nrows());
    let cols: usize = parts.iter().map(|m| m.ncols()).sum();
    let mut out = Matrix::zeros(rows, cols);
    let mut at = 0;
    for m in parts {
        out.columns_mut(at, m.ncols()).copy_from(m);
        at += m.ncols();
    }
    out
}

pub fn rel_err(x: f64, y: f64) -> f64 {
    if x == y {
        return 0.0;
    }
    (x - y).abs() / x.abs().max(y.abs())
}
