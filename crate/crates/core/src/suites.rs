//! Seeded randomized suites for the perturbation verifiers, plus the
//! truncation sweep of the block example.
//!
//! Every trial derives its own seed from `(suite seed, trial index)`, so a
//! failing trial can be re-run alone with [`run_trial`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion_frames::{Classification, WeightedFamily};
use crate::instances::{self, BlockExampleSpec, FamilySpec};
use crate::numerics::{self, Matrix, Tolerance};
use crate::perturbation::{self, WeightStrategy};
use crate::subspaces::Subspace;

/// Verifier suites. The serialized names are the ones the CLI accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Suite {
    /// `γ(T)(1−c²)^{1/2} ≤ γ(TP_W) ≤ ‖T‖(1−c²)^{1/2}`.
    #[serde(rename = "prop24")]
    GammaSandwich,
    /// Friedrichs-angle chain for PSD `A`.
    #[serde(rename = "thm25")]
    AngleBound,
    /// Equivalence of the three conditions on a family.
    #[serde(rename = "cor26")]
    Equivalence,
    /// Weight construction, perturbation and bound intervals end to end.
    #[serde(rename = "thm32")]
    EndToEnd,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::GammaSandwich,
        Suite::AngleBound,
        Suite::Equivalence,
        Suite::EndToEnd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::GammaSandwich => "prop24",
            Suite::AngleBound => "thm25",
            Suite::Equivalence => "cor26",
            Suite::EndToEnd => "thm32",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown suite {s:?}, expected one of prop24, thm25, cor26, thm32"
                ))
            })
    }
}

/// Randomized run parameters, parsed from `key=value` pairs such as
/// `dim=8,trials=500,seed=7` or `min_dim=4,max_dim=16,trials=500`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub min_dim: usize,
    pub max_dim: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        Self {
            min_dim: 4,
            max_dim: 16,
            trials: 100,
            seed: 0,
        }
    }
}

impl FromStr for RandomSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut spec = RandomSpec::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("expected key=value, got {part:?}")))?;
            let parse = |v: &str| {
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidInput(format!("{key}: {v:?} is not an integer")))
            };
            match key.trim() {
                "dim" => {
                    spec.min_dim = parse(value)? as usize;
                    spec.max_dim = spec.min_dim;
                }
                "min_dim" => spec.min_dim = parse(value)? as usize,
                "max_dim" => spec.max_dim = parse(value)? as usize,
                "trials" => spec.trials = parse(value)? as usize,
                "seed" => spec.seed = parse(value)?,
                other => return Err(Error::InvalidInput(format!("unknown key {other:?}"))),
            }
        }
        if spec.min_dim < 2 || spec.min_dim > spec.max_dim {
            return Err(Error::InvalidInput(format!(
                "need 2 <= min_dim <= max_dim, got {}..{}",
                spec.min_dim, spec.max_dim
            )));
        }
        Ok(spec)
    }
}

/// Per-trial seed; a SplitMix64 step over `seed + trial`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    let mut z = seed.wrapping_add((trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub seed: u64,
    pub dim: usize,
    pub hypothesis_met: bool,
    pub passed: bool,
    /// Smallest observed margin; negative values are violations.
    pub slack: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub spec: RandomSpec,
    pub trials: usize,
    pub passed: usize,
    pub skipped_hypothesis: usize,
    /// Largest violation `max(0, -slack)` over all trials.
    pub max_violation: f64,
    #[serde(with = "crate::io::extended_f64")]
    pub min_slack: f64,
    pub failures: Vec<TrialResult>,
}

impl SuiteOutcome {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run_random(suite: Suite, spec: &RandomSpec, tol: &Tolerance) -> Result<SuiteOutcome> {
    let mut outcome = SuiteOutcome {
        suite,
        spec: *spec,
        trials: spec.trials,
        passed: 0,
        skipped_hypothesis: 0,
        max_violation: 0.0,
        min_slack: f64::INFINITY,
        failures: Vec::new(),
    };
    for trial in 0..spec.trials {
        let r = run_trial(
            suite,
            trial_seed(spec.seed, trial),
            spec.min_dim,
            spec.max_dim,
            tol,
        )?;
        if !r.hypothesis_met {
            outcome.skipped_hypothesis += 1;
        }
        if r.passed {
            outcome.passed += 1;
        } else {
            outcome.failures.push(r.clone());
        }
        outcome.min_slack = outcome.min_slack.min(r.slack);
        outcome.max_violation = outcome.max_violation.max(-r.slack);
    }
    Ok(outcome)
}

pub fn run_trial(
    suite: Suite,
    seed: u64,
    min_dim: usize,
    max_dim: usize,
    tol: &Tolerance,
) -> Result<TrialResult> {
    let mut rng = instances::rng(seed);
    let n = rng.gen_range(min_dim..=max_dim);
    match suite {
        Suite::GammaSandwich => sandwich_trial(&mut rng, n, seed, tol),
        Suite::AngleBound => angle_bound_trial(&mut rng, n, seed, tol),
        Suite::Equivalence => equivalence_trial(&mut rng, n, seed, tol),
        Suite::EndToEnd => end_to_end_trial(&mut rng, n, seed, tol),
    }
}

fn sandwich_trial(rng: &mut impl Rng, n: usize, seed: u64, tol: &Tolerance) -> Result<TrialResult> {
    let rank = rng.gen_range(1..=n);
    let t = instances::random_operator_with_rank(n, n, rank, (0.2, 3.0), rng)?;
    let d = rng.gen_range(1..=n);
    let w = instances::random_subspace_with(n, d, rng)?;
    let r = perturbation::verify_prop_gammas(&t, &w, tol)?;
    Ok(TrialResult {
        seed,
        dim: n,
        hypothesis_met: r.hypothesis_met,
        passed: r.holds,
        slack: r.slack,
        detail: format!(
            "rank={rank} dim W={d} c={:.6e} lower={:.6e} gamma(TP_W)={:.6e} upper={:.6e}",
            r.cos_kernel, r.lower, r.gamma_tpw, r.upper
        ),
    })
}

fn angle_bound_trial(
    rng: &mut impl Rng,
    n: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<TrialResult> {
    let null_dim = rng.gen_range(0..n);
    let a = instances::random_psd_instance(n, null_dim, (0.3, 3.0), rng)?.matrix;
    let d = rng.gen_range(1..=n);
    let w = instances::random_subspace_with(n, d, rng)?;
    let r = perturbation::verify_thm_angle_bounds(&a, &w, tol)?;
    Ok(TrialResult {
        seed,
        dim: n,
        hypothesis_met: r.hypothesis_met,
        passed: r.holds,
        slack: r.slack,
        detail: format!(
            "null dim={null_dim} dim W={d} c(N(A),W)={:.6e} c(A^-1(W^perp),W)={:.6e} bound={:.6e} identity={}",
            r.cos_kernel, r.cos_preimage, r.bound, r.intersection_identity
        ),
    })
}

fn equivalence_trial(
    rng: &mut impl Rng,
    n: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<TrialResult> {
    let null_dim = rng.gen_range(1..n);
    let inst = instances::random_psd_instance(n, null_dim, (0.3, 3.0), rng)?;
    let count = rng.gen_range(1..=5);
    let ws = (0..count)
        .map(|_| {
            if rng.gen_bool(0.15) {
                let d = rng.gen_range(1..=null_dim);
                instances::random_subspace_inside(&inst.kernel, d, rng)
            } else {
                let d = rng.gen_range(1..=n);
                instances::random_subspace_with(n, d, rng)
            }
        })
        .collect::<Result<Vec<Subspace>>>()?;
    let r = perturbation::verify_cor_equivalence(&inst.matrix, &ws, tol)?;
    Ok(TrialResult {
        seed,
        dim: n,
        hypothesis_met: true,
        passed: r.passed(),
        slack: tol.cmp_tol - r.max_equality_error,
        detail: format!(
            "count={count} inf gamma={:.6e} sup c={:.6e} sup gap={:.6e} booleans=({}, {}, {}) max equality error={:.3e}",
            r.inf_gamma,
            r.sup_cos_kernel,
            r.sup_gap,
            r.gamma_positive,
            r.cos_below_one,
            r.gap_below_one,
            r.max_equality_error
        ),
    })
}

/// Checks for one perturbation instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndToEndCheck {
    pub condition_c: f64,
    pub windows_nonempty: bool,
    pub bounds_inside: bool,
    pub classification_ok: bool,
    pub proof_equalities_error: f64,
    pub sufficient_implication_ok: bool,
    pub slack: f64,
}

impl EndToEndCheck {
    pub fn passed(&self, equality_tol: f64) -> bool {
        self.windows_nonempty
            && self.bounds_inside
            && self.classification_ok
            && self.sufficient_implication_ok
            && self.proof_equalities_error <= equality_tol
    }
}

/// Runs every weight strategy on `(t, family)` with `A = ratio_scale · c · B`.
pub fn end_to_end(
    t: &Matrix,
    family: &WeightedFamily,
    b: f64,
    ratio_scale: f64,
    tol: &Tolerance,
) -> Result<Option<EndToEndCheck>> {
    let local = perturbation::local_quantities(t, family, tol)?;
    let cond = perturbation::condition_c(&local);
    if !cond.holds() {
        return Ok(None);
    }
    let a = ratio_scale * cond.c * b;
    let mut windows_nonempty = true;
    let mut bounds_inside = true;
    let mut classification_ok = true;
    let mut slack = f64::INFINITY;
    let rank_f = numerics::numerical_rank(&perturbation::composed_operator(t, family)?, tol)?;
    for strategy in [
        WeightStrategy::GeometricMid,
        WeightStrategy::LowerEdge,
        WeightStrategy::UpperEdge,
    ] {
        let report = perturbation::run_pipeline(t, family, Some((a, b)), strategy, tol)?;
        windows_nonempty &= report
            .weights
            .windows
            .iter()
            .all(|w| w.lo <= w.hi && w.chosen >= w.lo && w.chosen <= w.hi && w.chosen > 0.0);
        bounds_inside &= report.lower_inside && report.upper_inside && report.achieved.lower > 0.0;
        slack = slack.min(-report.lower_excess).min(-report.upper_excess);
        let expected = if report.achieved.span_dim == family.ambient_dim() {
            Classification::FusionFrame
        } else {
            Classification::FusionFrameSequence
        };
        classification_ok &=
            report.achieved.classification == expected && report.achieved.span_dim == rank_f;
    }

    let mut err: f64 = 0.0;
    for ((norm_fe, gamma_fe), (it, e)) in perturbation::block_quantities(t, family, tol)?
        .into_iter()
        .zip(family.items().iter().zip(&local.entries))
    {
        err = err.max((norm_fe - it.weight * e.norm).abs());
        err = err.max((gamma_fe - it.weight * e.gamma).abs());
    }

    let sc = perturbation::sufficient_conditions(t, family, tol)?;
    let any = sc.gamma_positive || sc.cos_below_one || sc.gap_below_one;
    Ok(Some(EndToEndCheck {
        condition_c: cond.c,
        windows_nonempty,
        bounds_inside,
        classification_ok,
        proof_equalities_error: err,
        sufficient_implication_ok: !any || cond.c > 0.0,
        slack,
    }))
}

const PROOF_EQUALITY_TOL: f64 = 1e-9;

fn end_to_end_trial(
    rng: &mut impl Rng,
    n: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<TrialResult> {
    let rank = if rng.gen_bool(0.5) {
        n
    } else {
        rng.gen_range(1..=n)
    };
    let t = instances::random_operator_with_rank(n, n, rank, (0.3, 3.0), rng)?;
    let count = rng.gen_range(1..=6);
    let dims = (0..count).map(|_| rng.gen_range(1..=n)).collect();
    let family = instances::random_family_with(
        &FamilySpec {
            ambient_dim: n,
            dims,
            weights_range: (0.5, 2.0),
            orthonormal: false,
        },
        rng,
    )?;
    let b = rng.gen_range(0.5..2.0);
    let scale = rng.gen_range(0.25..=1.0);
    match end_to_end(&t, &family, b, scale, tol)? {
        None => Ok(TrialResult {
            seed,
            dim: n,
            hypothesis_met: false,
            passed: true,
            slack: 0.0,
            detail: "condition constant is zero".into(),
        }),
        Some(check) => Ok(TrialResult {
            seed,
            dim: n,
            hypothesis_met: true,
            passed: check.passed(PROOF_EQUALITY_TOL),
            slack: check.slack,
            detail: format!(
                "rank={rank} count={count} c={:.6e} windows={} inside={} class={} eq err={:.3e} remark={}",
                check.condition_c,
                check.windows_nonempty,
                check.bounds_inside,
                check.classification_ok,
                check.proof_equalities_error,
                check.sufficient_implication_ok
            ),
        }),
    }
}

/// Result of running one suite's verifier on a fixed instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "suite")]
pub enum InstanceVerification {
    /// One sandwich check per subspace, with the instance operator as `T`.
    #[serde(rename = "prop24")]
    GammaSandwich {
        indices: Vec<perturbation::GammaSandwichReport>,
    },
    /// One angle-chain check per subspace, with the instance operator as `A`.
    #[serde(rename = "thm25")]
    AngleBound {
        indices: Vec<perturbation::AngleBoundReport>,
    },
    #[serde(rename = "cor26")]
    Equivalence {
        report: perturbation::EquivalenceReport,
    },
    /// `None` when the condition constant is zero.
    #[serde(rename = "thm32")]
    EndToEnd { check: Option<EndToEndCheck> },
}

impl InstanceVerification {
    pub fn passed(&self) -> bool {
        match self {
            Self::GammaSandwich { indices } => indices.iter().all(|r| r.holds),
            Self::AngleBound { indices } => indices.iter().all(|r| r.holds),
            Self::Equivalence { report } => report.passed(),
            Self::EndToEnd { check } => check.as_ref().is_none_or(|c| c.passed(PROOF_EQUALITY_TOL)),
        }
    }
}

/// Runs `suite` on a given operator and family. `thm32` uses `A = c`, `B = 1`.
pub fn verify_instance(
    suite: Suite,
    operator: &Matrix,
    family: &WeightedFamily,
    tol: &Tolerance,
) -> Result<InstanceVerification> {
    let subspaces = family.items().iter().map(|it| &it.subspace);
    Ok(match suite {
        Suite::GammaSandwich => InstanceVerification::GammaSandwich {
            indices: subspaces
                .map(|w| perturbation::verify_prop_gammas(operator, w, tol))
                .collect::<Result<_>>()?,
        },
        Suite::AngleBound => InstanceVerification::AngleBound {
            indices: subspaces
                .map(|w| perturbation::verify_thm_angle_bounds(operator, w, tol))
                .collect::<Result<_>>()?,
        },
        Suite::Equivalence => {
            let ws: Vec<Subspace> = subspaces.cloned().collect();
            InstanceVerification::Equivalence {
                report: perturbation::verify_cor_equivalence(operator, &ws, tol)?,
            }
        }
        Suite::EndToEnd => InstanceVerification::EndToEnd {
            check: end_to_end(operator, family, 1.0, 1.0, tol)?,
        },
    })
}

/// One truncation of the block example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub blocks: usize,
    pub condition_c: f64,
    /// Lower bound of the original family on its span.
    pub family_lower: f64,
    /// Lower bound of `(T(W_i), 1)` on its span.
    pub perturbed_lower: f64,
    pub perturbed_upper: f64,
}

/// `c` and frame bounds of the truncated example for each block count.
pub fn example_sweep(blocks: &[usize], theta0: f64, tol: &Tolerance) -> Result<Vec<SweepRow>> {
    blocks
        .iter()
        .map(|&k| {
            let ex = instances::block_example(&BlockExampleSpec::geometric(k, theta0)?);
            let local = perturbation::local_quantities(&ex.operator, &ex.family, tol)?;
            let cond = perturbation::condition_c(&local);
            let original = ex.family.frame_bounds(tol)?;
            let mut images = WeightedFamily::new(ex.family.ambient_dim());
            for it in ex.family.items() {
                images.push(
                    crate::subspaces::image(&ex.operator, &it.subspace, tol)?,
                    1.0,
                )?;
            }
            let perturbed = images.frame_bounds(tol)?;
            Ok(SweepRow {
                blocks: k,
                condition_c: cond.c,
                family_lower: original.lower,
                perturbed_lower: perturbed.lower,
                perturbed_upper: perturbed.upper,
            })
        })
        .collect()
}

/// `γ(TP_{W_i})` and `‖TP_{W_i}‖` for each index of the block example,
/// next to the values listed for this example in the literature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleGammaRow {
    pub index: usize,
    pub block: usize,
    pub kind: char,
    pub theta: f64,
    pub gamma: f64,
    pub norm: f64,
    pub ratio: f64,
    /// `sin θ_k` for `E_k`, `1/√2` for `F_k`.
    pub expected_gamma: f64,
    /// Literature value: `sin² θ_k` for `E_k`, `1/2` for `F_k`.
    pub literature_gamma: f64,
    /// The literature value is the square of the computed one.
    pub literature_is_square: bool,
}

pub fn example_gamma_table(
    spec: &BlockExampleSpec,
    tol: &Tolerance,
) -> Result<Vec<ExampleGammaRow>> {
    let ex = instances::block_example(spec);
    let local = perturbation::local_quantities(&ex.operator, &ex.family, tol)?;
    Ok(local
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let block = i / 2;
            let theta = spec.thetas()[block];
            let (kind, expected, literature) = if i % 2 == 0 {
                ('E', theta.sin(), theta.sin().powi(2))
            } else {
                ('F', std::f64::consts::FRAC_1_SQRT_2, 0.5)
            };
            ExampleGammaRow {
                index: i + 1,
                block,
                kind,
                theta,
                gamma: e.gamma,
                norm: e.norm,
                ratio: e.ratio.unwrap_or(0.0),
                expected_gamma: expected,
                literature_gamma: literature,
                literature_is_square: (e.gamma * e.gamma - literature).abs() <= 1e-9
                    && (e.gamma - literature).abs() > 1e-9,
            }
        })
        .collect())
}
