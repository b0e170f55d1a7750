//! Numerical checks of the angle and reduced-minimum-modulus inequalities.
//!
//! Each verifier returns a plain report. A failed hypothesis is reported with
//! `hypothesis_met = false` and is not counted as a failure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, Matrix, Tolerance};
use crate::subspaces::{self, Subspace};

fn check_domain(t: &Matrix, w: &Subspace, context: &'static str) -> Result<()> {
    if t.ncols() != w.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context,
            expected: t.ncols(),
            actual: w.ambient_dim(),
        });
    }
    Ok(())
}

fn check_square(a: &Matrix, n: usize, context: &'static str) -> Result<()> {
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch {
            context,
            expected: n,
            actual: if a.nrows() != n { a.nrows() } else { a.ncols() },
        });
    }
    Ok(())
}

/// `γ(T)(1−c²)^{1/2} ≤ γ(T P_W) ≤ ‖T‖(1−c²)^{1/2}` with `c = c_F(N(T), W)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSandwichReport {
    pub hypothesis_met: bool,
    pub reason: Option<String>,
    pub cos_kernel: f64,
    #[serde(with = "crate::io::extended_f64")]
    pub gamma_t: f64,
    pub norm_t: f64,
    #[serde(with = "crate::io::extended_f64")]
    pub gamma_tpw: f64,
    pub lower: f64,
    pub upper: f64,
    /// `min(γ(TP_W) − lower, upper − γ(TP_W))`; negative means violated.
    pub slack: f64,
    pub holds: bool,
}

pub fn verify_prop_gammas(
    t: &Matrix,
    w: &Subspace,
    tol: &Tolerance,
) -> Result<GammaSandwichReport> {
    check_domain(t, w, "verify_prop_gammas")?;
    let kernel = subspaces::kernel(t, tol)?;
    let c = subspaces::cos_friedrichs(&kernel, w, tol)?;
    let gamma_t = numerics::gamma(t, tol)?;
    let norm_t = numerics::operator_norm(t)?;
    let tpw = t * w.projector();
    let gamma_tpw = numerics::gamma(&tpw, tol)?;
    let tpw_vanishes = numerics::operator_norm(&tpw)? <= tol.cmp_tol * norm_t;
    let s = (1.0 - c * c).max(0.0).sqrt();
    let lower = if gamma_t.is_finite() {
        gamma_t * s
    } else {
        0.0
    };
    let upper = norm_t * s;

    let reason = if c >= 1.0 - tol.cmp_tol {
        Some(format!("c(N(T), W) = {c} is not below 1"))
    } else if !gamma_tpw.is_finite() || tpw_vanishes {
        Some("T P_W = 0 (W is zero or inside N(T))".to_string())
    } else {
        None
    };
    if let Some(reason) = reason {
        return Ok(GammaSandwichReport {
            hypothesis_met: false,
            reason: Some(reason),
            cos_kernel: c,
            gamma_t,
            norm_t,
            gamma_tpw,
            lower,
            upper,
            slack: 0.0,
            holds: true,
        });
    }
    let slack = (gamma_tpw - lower).min(upper - gamma_tpw);
    Ok(GammaSandwichReport {
        hypothesis_met: true,
        reason: None,
        cos_kernel: c,
        gamma_t,
        norm_t,
        gamma_tpw,
        lower,
        upper,
        slack,
        holds: slack >= -tol.cmp_tol,
    })
}

/// Chain `c_F(N(A), W) ≤ c_F(A⁻¹(W⊥), W) ≤ [1 − γ(A^{1/2})⁴/‖A‖² (1 − c_F(N(A), W)²)]^{1/2}`
/// for Hermitian PSD `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleBoundReport {
    pub hypothesis_met: bool,
    pub reason: Option<String>,
    pub cos_kernel: f64,
    pub cos_preimage: f64,
    pub bound: f64,
    #[serde(with = "crate::io::extended_f64")]
    pub gamma_sqrt: f64,
    pub norm_a: f64,
    /// `A⁻¹(W⊥) ∩ W` and `N(A) ∩ W` have the same span.
    pub intersection_identity: bool,
    pub slack: f64,
    pub holds: bool,
}

pub fn verify_thm_angle_bounds(
    a: &Matrix,
    w: &Subspace,
    tol: &Tolerance,
) -> Result<AngleBoundReport> {
    check_square(a, w.ambient_dim(), "verify_thm_angle_bounds")?;
    numerics::check_psd(a, tol)?;
    let kernel = subspaces::kernel(a, tol)?;
    let c_kernel = subspaces::cos_friedrichs(&kernel, w, tol)?;
    let pre = subspaces::preimage_of_complement(a, w, tol)?;
    let c_pre = subspaces::cos_friedrichs(&pre, w, tol)?;
    let root = numerics::psd_sqrt(a, tol)?;
    let gamma_sqrt = numerics::gamma(&root, tol)?;
    let norm_a = numerics::operator_norm(a)?;

    let lhs = subspaces::intersect(&pre, w, tol)?;
    let rhs = subspaces::intersect(&kernel, w, tol)?;
    let intersection_identity = lhs.same_span(&rhs, tol)?;

    let mut report = AngleBoundReport {
        hypothesis_met: true,
        reason: None,
        cos_kernel: c_kernel,
        cos_preimage: c_pre,
        bound: 1.0,
        gamma_sqrt,
        norm_a,
        intersection_identity,
        slack: 0.0,
        holds: true,
    };
    if norm_a == 0.0 || !gamma_sqrt.is_finite() {
        report.hypothesis_met = false;
        report.reason = Some("A = 0".to_string());
        return Ok(report);
    }
    if c_kernel >= 1.0 - tol.cmp_tol {
        report.hypothesis_met = false;
        report.reason = Some(format!("c(N(A), W) = {c_kernel} is not below 1"));
        return Ok(report);
    }
    let g4 = gamma_sqrt.powi(4);
    report.bound = (1.0 - g4 / (norm_a * norm_a) * (1.0 - c_kernel * c_kernel))
        .max(0.0)
        .sqrt();
    report.slack = (c_pre - c_kernel).min(report.bound - c_pre);
    report.holds = report.slack >= -tol.cmp_tol && intersection_identity;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorIndexReport {
    /// `γ(A P_{W_i})`.
    #[serde(with = "crate::io::extended_f64")]
    pub gamma: f64,
    /// `c_F(N(A), W_i)`.
    pub cos_kernel: f64,
    /// `δ(A(W_i), W_i)`.
    pub gap: f64,
    /// `c_F(A⁻¹(W_i⊥), W_i)`.
    pub cos_preimage: f64,
    /// `A` annihilates a nonzero `W_i`.
    pub degenerate: bool,
    pub equality_checked: bool,
    pub equality_holds: bool,
}

/// Threshold-boolean form of the three equivalent conditions
/// `inf γ(A P_{W_i}) > 0`, `sup c_F(N(A), W_i) < 1`, `sup δ(A(W_i), W_i) < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub indices: Vec<CorIndexReport>,
    #[serde(with = "crate::io::extended_f64")]
    pub inf_gamma: f64,
    pub sup_cos_kernel: f64,
    pub sup_gap: f64,
    pub gamma_positive: bool,
    pub cos_below_one: bool,
    pub gap_below_one: bool,
    pub conditions_agree: bool,
    pub equalities_hold: bool,
    /// Largest `|δ(A(W_i), W_i) − c_F(A⁻¹(W_i⊥), W_i)|` over checked indices.
    pub max_equality_error: f64,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.conditions_agree && self.equalities_hold
    }
}

/// A nonzero `W_i` with `‖A P_{W_i}‖ ≤ cmp_tol·‖A‖` is degenerate and
/// reported as `γ = 0`, cosine `1`, gap `1`.
pub fn verify_cor_equivalence(
    a: &Matrix,
    ws: &[Subspace],
    tol: &Tolerance,
) -> Result<EquivalenceReport> {
    let n = a.nrows();
    for w in ws {
        check_square(a, w.ambient_dim(), "verify_cor_equivalence")?;
    }
    numerics::check_psd(a, tol)?;
    let kernel = subspaces::kernel(a, tol)?;
    let norm_a = numerics::operator_norm(a)?;

    let mut indices = Vec::with_capacity(ws.len());
    for w in ws {
        debug_assert_eq!(w.ambient_dim(), n);
        let ap = a * w.projector();
        let ap_norm = numerics::operator_norm(&ap)?;
        let degenerate = !w.is_zero() && ap_norm <= tol.cmp_tol * norm_a.max(f64::MIN_POSITIVE);
        let cos_preimage =
            subspaces::cos_friedrichs(&subspaces::preimage_of_complement(a, w, tol)?, w, tol)?;
        if degenerate {
            indices.push(CorIndexReport {
                gamma: 0.0,
                cos_kernel: 1.0,
                gap: 1.0,
                cos_preimage,
                degenerate,
                equality_checked: false,
                equality_holds: true,
            });
            continue;
        }
        let gamma = numerics::gamma(&ap, tol)?;
        let cos_kernel = subspaces::cos_friedrichs(&kernel, w, tol)?;
        let gap = subspaces::gap(&subspaces::image(a, w, tol)?, w)?;
        let equality_checked = cos_kernel < 1.0 - tol.cmp_tol || gap < 1.0 - tol.cmp_tol;
        let equality_holds = !equality_checked || (gap - cos_preimage).abs() <= tol.cmp_tol;
        indices.push(CorIndexReport {
            gamma,
            cos_kernel,
            gap,
            cos_preimage,
            degenerate,
            equality_checked,
            equality_holds,
        });
    }

    let inf_gamma = indices
        .iter()
        .map(|r| r.gamma)
        .fold(f64::INFINITY, f64::min);
    let sup_cos_kernel = indices.iter().map(|r| r.cos_kernel).fold(0.0, f64::max);
    let sup_gap = indices.iter().map(|r| r.gap).fold(0.0, f64::max);
    let gamma_positive = inf_gamma > tol.cmp_tol;
    let cos_below_one = sup_cos_kernel < 1.0 - tol.cmp_tol;
    let gap_below_one = sup_gap < 1.0 - tol.cmp_tol;
    let max_equality_error = indices
        .iter()
        .filter(|r| r.equality_checked)
        .map(|r| (r.gap - r.cos_preimage).abs())
        .fold(0.0, f64::max);
    Ok(EquivalenceReport {
        conditions_agree: gamma_positive == cos_below_one && cos_below_one == gap_below_one,
        equalities_hold: indices.iter().all(|r| r.equality_holds),
        indices,
        inf_gamma,
        sup_cos_kernel,
        sup_gap,
        gamma_positive,
        cos_below_one,
        gap_below_one,
        max_equality_error,
    })
}
