//! Subspaces of a finite-dimensional complex Hilbert space and the angles
//! between them.
//!
//! A [`Subspace`] stores an orthonormal basis; every quantity is a function of
//! the column span only. Angles are reported as cosines:
//!
//! * `cos_dixmier(M, N) = ||P_M P_N||` (minimal angle),
//! * `cos_friedrichs(M, N) = ||P_M P_N P_{(M∩N)⊥}||`,
//! * `gap(M, N) = ||P_{N⊥} P_M||` (not symmetric).
//!
//! Any angle that involves the zero subspace is 0.

use crate::error::{Error, Result};
use crate::numerics::{self, Matrix, Tolerance};

#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: Matrix,
}

const ORTHONORMAL_TOL: f64 = 1e-10;

impl Subspace {
    /// Wraps a basis that must already have orthonormal columns.
    pub fn from_orthonormal(basis: Matrix) -> Result<Self> {
        numerics::check_finite(&basis)?;
        if basis.ncols() > basis.nrows() {
            return Err(Error::InvalidInput(format!(
                "{} basis vectors in dimension {}",
                basis.ncols(),
                basis.nrows()
            )));
        }
        let k = basis.ncols();
        let defect = (basis.adjoint() * &basis - Matrix::identity(k, k)).norm();
        if defect > ORTHONORMAL_TOL {
            return Err(Error::InvalidInput(format!(
                "basis is not orthonormal (defect {defect:e})"
            )));
        }
        Ok(Self { basis })
    }

    pub(crate) fn from_orthonormal_unchecked(basis: Matrix) -> Self {
        Self { basis }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            basis: Matrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            basis: numerics::identity(ambient_dim),
        }
    }

    /// Orthonormal basis of the column span of `cols`, rank decided by the
    /// shared rank policy.
    pub fn from_generators(cols: &Matrix, tol: &Tolerance) -> Result<Self> {
        Ok(Self {
            basis: numerics::range_basis(cols, tol)?,
        })
    }

    /// Span of the leading `dim` left singular vectors of `cols`.
    fn from_generators_with_dim(cols: &Matrix, dim: usize) -> Result<Self> {
        let dec = numerics::svd(cols)?;
        let dim = dim.min(dec.singular_values.len());
        Ok(Self {
            basis: dec.u.columns(0, dim).into_owned(),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn projector(&self) -> Matrix {
        &self.basis * self.basis.adjoint()
    }

    pub fn complement(&self) -> Result<Self> {
        let n = self.ambient_dim();
        if self.is_zero() {
            return Ok(Self::full(n));
        }
        let ns = numerics::null_space(&self.basis.adjoint(), &Tolerance::default())?;
        // singular values of an isometry are all 1, so the split is exact
        debug_assert_eq!(ns.ncols(), n - self.dim());
        Ok(Self { basis: ns })
    }

    /// True when both subspaces have the same span, up to the intersection tolerance.
    pub fn same_span(&self, other: &Self, tol: &Tolerance) -> Result<bool> {
        if self.dim() != other.dim() || self.ambient_dim() != other.ambient_dim() {
            return Ok(false);
        }
        Ok(intersect(self, other, tol)?.dim() == self.dim())
    }
}

fn check_same_ambient(m: &Subspace, n: &Subspace, context: &'static str) -> Result<()> {
    if m.ambient_dim() != n.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context,
            expected: m.ambient_dim(),
            actual: n.ambient_dim(),
        });
    }
    Ok(())
}

/// Cosines of the principal angles between `m` and `n`, descending.
pub fn principal_cosines(m: &Subspace, n: &Subspace) -> Result<Vec<f64>> {
    check_same_ambient(m, n, "principal_cosines")?;
    let cross = m.basis.adjoint() * &n.basis;
    Ok(numerics::singular_values(&cross)?
        .into_iter()
        .map(|c| c.min(1.0))
        .collect())
}

/// `M ∩ N`, spanned by the principal vectors of `M` whose cosine is at
/// least `1 - intersection_tol`.
pub fn intersect(m: &Subspace, n: &Subspace, tol: &Tolerance) -> Result<Subspace> {
    check_same_ambient(m, n, "intersect")?;
    if m.is_zero() || n.is_zero() {
        return Ok(Subspace::zero(m.ambient_dim()));
    }
    let cross = m.basis.adjoint() * &n.basis;
    let dec = numerics::svd(&cross)?;
    let r = dec
        .singular_values
        .iter()
        .take_while(|&&s| s >= 1.0 - tol.intersection_tol)
        .count();
    let basis = &m.basis * dec.u.columns(0, r);
    Ok(Subspace::from_orthonormal_unchecked(basis))
}

/// `M ⊖ N := M ∩ (M ∩ N)⊥`.
pub fn ominus(m: &Subspace, n: &Subspace, tol: &Tolerance) -> Result<Subspace> {
    let common = intersect(m, n, tol)?;
    if common.is_zero() {
        return Ok(m.clone());
    }
    let residual = &m.basis - &common.basis * (common.basis.adjoint() * &m.basis);
    Subspace::from_generators_with_dim(&residual, m.dim() - common.dim())
}

/// `T(W)`; closed automatically in finite dimension. Directions of `W` that
/// `T` shrinks to at most `cmp_tol·‖T‖` count as lying in `N(T)`, the same
/// rule that marks an index degenerate.
pub fn image(t: &Matrix, w: &Subspace, tol: &Tolerance) -> Result<Subspace> {
    if t.ncols() != w.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "image",
            expected: t.ncols(),
            actual: w.ambient_dim(),
        });
    }
    if w.is_zero() {
        return Ok(Subspace::zero(t.nrows()));
    }
    let tw = t * &w.basis;
    let floor = tol.cmp_tol * numerics::operator_norm(t)?;
    let dim = numerics::singular_values(&tw)?
        .iter()
        .filter(|&&s| s > floor)
        .count();
    Subspace::from_generators_with_dim(&tw, dim)
}

/// `A⁻¹(W⊥) = {x : Ax ∈ W⊥}`, the null space of `P_W A`.
pub fn preimage_of_complement(a: &Matrix, w: &Subspace, tol: &Tolerance) -> Result<Subspace> {
    let n = w.ambient_dim();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "preimage_of_complement",
            expected: n,
            actual: if a.nrows() != n { a.nrows() } else { a.ncols() },
        });
    }
    if w.is_zero() {
        return Ok(Subspace::full(n));
    }
    // P_W A and W* A share their kernel since W has orthonormal columns
    let reduced = w.basis.adjoint() * a;
    Ok(Subspace::from_orthonormal_unchecked(numerics::null_space(
        &reduced, tol,
    )?))
}

/// Null space of an operator as a subspace of its domain.
pub fn kernel(t: &Matrix, tol: &Tolerance) -> Result<Subspace> {
    Ok(Subspace::from_orthonormal_unchecked(numerics::null_space(
        t, tol,
    )?))
}

/// Cosine of the minimal (Dixmier) angle, `||P_M P_N||`.
pub fn cos_dixmier(m: &Subspace, n: &Subspace) -> Result<f64> {
    check_same_ambient(m, n, "cos_dixmier")?;
    if m.is_zero() || n.is_zero() {
        return Ok(0.0);
    }
    Ok(numerics::operator_norm(&(m.basis.adjoint() * &n.basis))?.min(1.0))
}

/// Cosine of the Friedrichs angle, `||P_M P_N P_{(M∩N)⊥}||`.
pub fn cos_friedrichs(m: &Subspace, n: &Subspace, tol: &Tolerance) -> Result<f64> {
    check_same_ambient(m, n, "cos_friedrichs")?;
    if m.is_zero() || n.is_zero() {
        return Ok(0.0);
    }
    let common = intersect(m, n, tol)?;
    // W_M* W_N W_N* (I - P_{M∩N}); the outer isometries do not change the norm
    let nt = n.basis.adjoint();
    let outside = &nt - (&nt * &common.basis) * common.basis.adjoint();
    let op = (m.basis.adjoint() * &n.basis) * outside;
    Ok(numerics::operator_norm(&op)?.min(1.0))
}

/// Gap `δ(M, N) = sup_{x ∈ M, ||x|| = 1} dist(x, N) = ||P_{N⊥} P_M||`.
pub fn gap(m: &Subspace, n: &Subspace) -> Result<f64> {
    check_same_ambient(m, n, "gap")?;
    cos_dixmier(&n.complement()?, m)
}
