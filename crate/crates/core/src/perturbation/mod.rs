//! Operator perturbation of fusion frames.
//!
//! Given a family `(W_i, w_i)` and an operator `T`, the per-index quantities
//! `γ_i = γ(T P_{W_i})` and `‖T P_{W_i}‖` determine the condition constant
//! `c = min_i γ_i² / ‖T P_{W_i}‖²`. When `0 < A ≤ B` with `A/B ≤ c`, any new
//! weights with
//!
//! ```text
//! w_i ‖T P_{W_i}‖ / √B  ≤  v_i  ≤  w_i γ_i / √A
//! ```
//!
//! make `(T(W_i), v_i)` a fusion frame sequence whose optimal bounds lie in
//! `[γ(F)²/B, γ(F)²/A]` and `[‖F‖²/B, ‖F‖²/A]`, where `F = T · T_W` is the
//! operator on the block space `⊕ W_i`.

mod verify;

pub use verify::{
    verify_cor_equivalence, verify_prop_gammas, verify_thm_angle_bounds, AngleBoundReport,
    CorIndexReport, EquivalenceReport, GammaSandwichReport,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion_frames::WeightedFamily;
use crate::numerics::{self, Matrix, Tolerance};
use crate::subspaces::{self, Subspace};

/// `γ(T P_{W_i})`, `‖T P_{W_i}‖` and their squared ratio for one index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalEntry {
    #[serde(with = "crate::io::extended_f64")]
    pub gamma: f64,
    pub norm: f64,
    /// `None` for a degenerate index (`W_i ⊆ N(T)`).
    pub ratio: Option<f64>,
}

impl LocalEntry {
    pub fn is_degenerate(&self) -> bool {
        self.ratio.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalQuantities {
    pub entries: Vec<LocalEntry>,
}

impl LocalQuantities {
    pub fn degenerate_indices(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_degenerate())
            .map(|(i, _)| i)
            .collect()
    }
}

fn check_operator(t: &Matrix, family: &WeightedFamily) -> Result<()> {
    let n = family.ambient_dim();
    if t.nrows() != n || t.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "operator vs family ambient dimension",
            expected: n,
            actual: if t.nrows() != n { t.nrows() } else { t.ncols() },
        });
    }
    numerics::check_finite(t)
}

/// Per-index `γ(T P_{W_i})` and `‖T P_{W_i}‖`.
///
/// An index is degenerate when `‖T P_{W_i}‖ ≤ cmp_tol · ‖T‖`, i.e. `T`
/// annihilates `W_i` up to tolerance; its ratio is left undefined.
pub fn local_quantities(
    t: &Matrix,
    family: &WeightedFamily,
    tol: &Tolerance,
) -> Result<LocalQuantities> {
    check_operator(t, family)?;
    let t_norm = numerics::operator_norm(t)?;
    let entries = family
        .items()
        .iter()
        .map(|it| {
            let tp = t * it.subspace.projector();
            let norm = numerics::operator_norm(&tp)?;
            let degenerate = it.subspace.is_zero() || norm <= tol.cmp_tol * t_norm;
            if degenerate {
                return Ok(LocalEntry {
                    gamma: 0.0,
                    norm,
                    ratio: None,
                });
            }
            let gamma = numerics::gamma(&tp, tol)?;
            let ratio = ((gamma * gamma) / (norm * norm)).min(1.0);
            Ok(LocalEntry {
                gamma,
                norm,
                ratio: Some(ratio),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalQuantities { entries })
}

/// The condition constant together with where it is attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionConstant {
    /// Minimum ratio, forced to 0 when any index is degenerate.
    pub c: f64,
    /// Minimum over the non-degenerate indices only.
    pub c_nondegenerate: Option<f64>,
    pub argmin: Option<usize>,
    pub degenerate_indices: Vec<usize>,
}

impl ConditionConstant {
    pub fn holds(&self) -> bool {
        self.c > 0.0
    }
}

pub fn condition_c(q: &LocalQuantities) -> ConditionConstant {
    let mut best: Option<(usize, f64)> = None;
    for (i, e) in q.entries.iter().enumerate() {
        if let Some(r) = e.ratio {
            if best.is_none_or(|(_, b)| r < b) {
                best = Some((i, r));
            }
        }
    }
    let degenerate_indices = q.degenerate_indices();
    let c_nondegenerate = best.map(|(_, r)| r);
    let c = if degenerate_indices.is_empty() {
        c_nondegenerate.unwrap_or(0.0)
    } else {
        0.0
    };
    let argmin = if degenerate_indices.is_empty() {
        best.map(|(i, _)| i)
    } else {
        degenerate_indices.first().copied()
    };
    ConditionConstant {
        c,
        c_nondegenerate,
        argmin,
        degenerate_indices,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightStrategy {
    #[default]
    GeometricMid,
    LowerEdge,
    UpperEdge,
}

impl std::str::FromStr for WeightStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometric_mid" => Ok(Self::GeometricMid),
            "lower_edge" => Ok(Self::LowerEdge),
            "upper_edge" => Ok(Self::UpperEdge),
            other => Err(Error::InvalidInput(format!(
                "unknown weight strategy {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
    pub chosen: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightWindow {
    pub a: f64,
    pub b: f64,
    pub strategy: WeightStrategy,
    pub windows: Vec<Window>,
}

impl WeightWindow {
    pub fn chosen(&self) -> Vec<f64> {
        self.windows.iter().map(|w| w.chosen).collect()
    }
}

// A = c*B reproduces c only up to rounding
const RATIO_SLACK: f64 = 1e-12;

/// Admissible new weights `v_i ∈ [w_i ‖T P_{W_i}‖/√B, w_i γ_i/√A]`.
pub fn construct_weights(
    q: &LocalQuantities,
    old_weights: &[f64],
    a: f64,
    b: f64,
    strategy: WeightStrategy,
) -> Result<WeightWindow> {
    if old_weights.len() != q.entries.len() {
        return Err(Error::DimensionMismatch {
            context: "construct_weights",
            expected: q.entries.len(),
            actual: old_weights.len(),
        });
    }
    if !(a.is_finite() && b.is_finite() && a > 0.0 && a <= b) {
        return Err(Error::InvalidInput(format!(
            "need 0 < A <= B < inf, got A = {a}, B = {b}"
        )));
    }
    let a_over_b = a / b;
    let mut windows = Vec::with_capacity(old_weights.len());
    for (i, (e, &w)) in q.entries.iter().zip(old_weights).enumerate() {
        let ratio = e.ratio.unwrap_or(0.0);
        if e.is_degenerate() || a_over_b > ratio * (1.0 + RATIO_SLACK) {
            return Err(Error::HypothesisViolation {
                index: i,
                ratio,
                a_over_b,
            });
        }
        let lo = w * e.norm / b.sqrt();
        let hi = (w * e.gamma / a.sqrt()).max(lo);
        let chosen = match strategy {
            WeightStrategy::GeometricMid => (lo * hi).sqrt().clamp(lo, hi),
            WeightStrategy::LowerEdge => lo,
            WeightStrategy::UpperEdge => hi,
        };
        windows.push(Window { lo, hi, chosen });
    }
    Ok(WeightWindow {
        a,
        b,
        strategy,
        windows,
    })
}

/// `(A, B) = (c·B₀, B₀)` with `B₀ = 1`, the loosest admissible pair.
pub fn default_bounds(c: &ConditionConstant) -> (f64, f64) {
    (c.c, 1.0)
}

/// The perturbed family `(T(W_i), v_i)`.
pub fn perturb(
    t: &Matrix,
    family: &WeightedFamily,
    weights: &WeightWindow,
    tol: &Tolerance,
) -> Result<WeightedFamily> {
    check_operator(t, family)?;
    if weights.windows.len() != family.len() {
        return Err(Error::DimensionMismatch {
            context: "perturb",
            expected: family.len(),
            actual: weights.windows.len(),
        });
    }
    let mut out = WeightedFamily::new(t.nrows());
    for (it, win) in family.items().iter().zip(&weights.windows) {
        out.push(subspaces::image(t, &it.subspace, tol)?, win.chosen)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lo - slack && x <= self.hi + slack
    }
}

/// Predicted intervals for the optimal bounds of the perturbed family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPrediction {
    /// `γ(F)` for `F = T · T_W`.
    #[serde(with = "crate::io::extended_f64")]
    pub gamma_f: f64,
    /// `‖F‖`.
    pub norm_f: f64,
    pub lower: Interval,
    pub upper: Interval,
}

/// `F = T · T_W`, the synthesis operator of the family followed by `T`.
pub fn composed_operator(t: &Matrix, family: &WeightedFamily) -> Result<Matrix> {
    check_operator(t, family)?;
    Ok(t * family.synthesis_matrix()?)
}

pub fn predict_bounds(
    t: &Matrix,
    family: &WeightedFamily,
    a: f64,
    b: f64,
    tol: &Tolerance,
) -> Result<BoundPrediction> {
    if !(a > 0.0 && a <= b && b.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "need 0 < A <= B < inf, got A = {a}, B = {b}"
        )));
    }
    let f = composed_operator(t, family)?;
    let gamma_f = numerics::gamma(&f, tol)?;
    let norm_f = numerics::operator_norm(&f)?;
    let g2 = if gamma_f.is_finite() {
        gamma_f * gamma_f
    } else {
        0.0
    };
    Ok(BoundPrediction {
        gamma_f,
        norm_f,
        lower: Interval {
            lo: g2 / b,
            hi: g2 / a,
        },
        upper: Interval {
            lo: norm_f * norm_f / b,
            hi: norm_f * norm_f / a,
        },
    })
}

/// `‖F P_{E_i}‖` and `γ(F P_{E_i})` for every block of the synthesis domain.
pub fn block_quantities(
    t: &Matrix,
    family: &WeightedFamily,
    tol: &Tolerance,
) -> Result<Vec<(f64, f64)>> {
    let f = composed_operator(t, family)?;
    (0..family.len())
        .map(|i| {
            let fp = &f * family.block_projector(i);
            Ok((numerics::operator_norm(&fp)?, numerics::gamma(&fp, tol)?))
        })
        .collect()
}

/// Everything the perturbation pipeline computes for one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub local: LocalQuantities,
    pub condition: ConditionConstant,
    pub weights: WeightWindow,
    pub prediction: BoundPrediction,
    pub achieved: crate::fusion_frames::FrameAnalysis,
    pub lower_inside: bool,
    pub upper_inside: bool,
    /// Signed distance of each achieved bound outside its interval (≤ 0 when inside).
    pub lower_excess: f64,
    pub upper_excess: f64,
}

impl PerturbationReport {
    pub fn passed(&self) -> bool {
        self.lower_inside && self.upper_inside && self.achieved.lower > 0.0
    }
}

fn excess(iv: &Interval, x: f64) -> f64 {
    (iv.lo - x).max(x - iv.hi)
}

/// Runs the whole pipeline. `bounds = None` uses [`default_bounds`].
pub fn run_pipeline(
    t: &Matrix,
    family: &WeightedFamily,
    bounds: Option<(f64, f64)>,
    strategy: WeightStrategy,
    tol: &Tolerance,
) -> Result<PerturbationReport> {
    let local = local_quantities(t, family, tol)?;
    let condition = condition_c(&local);
    let (a, b) = bounds.unwrap_or_else(|| default_bounds(&condition));
    if !condition.holds() {
        let index = condition.argmin.unwrap_or(0);
        return Err(Error::HypothesisViolation {
            index,
            ratio: condition.c,
            a_over_b: if b > 0.0 { a / b } else { f64::NAN },
        });
    }
    let weights = construct_weights(&local, &family.weights(), a, b, strategy)?;
    let perturbed = perturb(t, family, &weights, tol)?;
    let prediction = predict_bounds(t, family, a, b, tol)?;
    let achieved = perturbed.frame_bounds(tol)?;
    let lower_excess = excess(&prediction.lower, achieved.lower);
    let upper_excess = excess(&prediction.upper, achieved.upper);
    Ok(PerturbationReport {
        local,
        condition,
        lower_inside: lower_excess <= tol.cmp_tol,
        upper_inside: upper_excess <= tol.cmp_tol,
        lower_excess,
        upper_excess,
        weights,
        prediction,
        achieved,
    })
}

/// The three sufficient conditions for a positive condition constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SufficientConditions {
    #[serde(with = "crate::io::extended_f64")]
    pub inf_gamma: f64,
    pub sup_cos_kernel: f64,
    pub sup_gap_gram: f64,
    pub gamma_positive: bool,
    pub cos_below_one: bool,
    pub gap_below_one: bool,
}

/// Evaluates `inf γ(T P_{W_i}) > 0`, `sup c(N(T), W_i) < 1` and
/// `sup δ(T*T(W_i), W_i) < 1` at `cmp_tol` thresholds.
pub fn sufficient_conditions(
    t: &Matrix,
    family: &WeightedFamily,
    tol: &Tolerance,
) -> Result<SufficientConditions> {
    let local = local_quantities(t, family, tol)?;
    let kernel = subspaces::kernel(t, tol)?;
    let gram = t.adjoint() * t;
    let mut inf_gamma = f64::INFINITY;
    let mut sup_cos: f64 = 0.0;
    let mut sup_gap: f64 = 0.0;
    for (it, e) in family.items().iter().zip(&local.entries) {
        let w: &Subspace = &it.subspace;
        if e.is_degenerate() {
            // T annihilates W_i: treated as the worst case for all three
            inf_gamma = 0.0;
            sup_cos = 1.0;
            sup_gap = 1.0;
            continue;
        }
        inf_gamma = inf_gamma.min(e.gamma);
        sup_cos = sup_cos.max(subspaces::cos_friedrichs(&kernel, w, tol)?);
        sup_gap = sup_gap.max(subspaces::gap(&subspaces::image(&gram, w, tol)?, w)?);
    }
    Ok(SufficientConditions {
        inf_gamma,
        sup_cos_kernel: sup_cos,
        sup_gap_gram: sup_gap,
        gamma_positive: inf_gamma > tol.cmp_tol,
        cos_below_one: sup_cos < 1.0 - tol.cmp_tol,
        gap_below_one: sup_gap < 1.0 - tol.cmp_tol,
    })
}

#[cfg(test)]
mod tests;
