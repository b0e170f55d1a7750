use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use fusionframe::fusion_frames::FrameAnalysis;
use fusionframe::instances::{self, BlockExampleSpec};
use fusionframe::io::{self, Instance, InstanceFile, Report};
use fusionframe::perturbation::{self, PerturbationReport, WeightStrategy};
use fusionframe::suites::{self, InstanceVerification, RandomSpec, Suite, SuiteOutcome};
use fusionframe::{subspaces, Error, Matrix, Tolerance};

use crate::{Cli, Command, GlobalOpts};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_HYPOTHESIS: u8 = 3;

/// A failed command: message for stderr and the exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::HypothesisViolation { .. } => EXIT_HYPOTHESIS,
            Error::Computation(_) => EXIT_FAILED,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    usage(format!("{}: {e}", path.display()))
}

type CmdResult = Result<u8, Failure>;

pub fn run(cli: Cli) -> u8 {
    let g = &cli.global;
    let result = Tolerance::new(g.rank_tol, g.tol, g.tol)
        .map_err(Failure::from)
        .and_then(|tol| match &cli.command {
            Command::Analyze {
                instance,
                angles,
                perturb,
            } => analyze(g, &tol, instance, *angles, *perturb),
            Command::Perturb {
                instance,
                a,
                b,
                strategy,
            } => perturb_cmd(g, &tol, instance, *a, *b, *strategy),
            Command::Verify {
                instance,
                random,
                suite,
            } => verify(g, &tol, instance.as_deref(), random.as_deref(), *suite),
            Command::Example {
                blocks,
                theta0,
                plot,
            } => example(g, &tol, *blocks, *theta0, plot.as_deref()),
        });
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn read_instance(path: &Path, tol: &Tolerance) -> Result<(Instance, String), Failure> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| io_failure(path, e))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?
    };
    let inst = InstanceFile::parse(&text)?.load(tol)?;
    for w in &inst.warnings {
        eprintln!("warning: {w}");
    }
    Ok((inst, io::sha256_hex(text.as_bytes())))
}

fn require_operator(inst: &Instance, command: &str) -> Result<Matrix, Failure> {
    let op = inst
        .operator
        .clone()
        .ok_or_else(|| usage(format!("{command}: instance has no operator")))?;
    io::check_square_operator(&op, inst.family.ambient_dim())?;
    Ok(op)
}

fn emit_json<T: Serialize>(g: &GlobalOpts, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| usage(e.to_string()))?;
    text.push('\n');
    match &g.out {
        Some(path) => io::write_atomic(path, text.as_bytes()).map_err(|e| io_failure(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| usage(e.to_string())),
    }
}

fn emit_report<T: Serialize>(
    g: &GlobalOpts,
    command: &str,
    sha: Option<String>,
    tol: &Tolerance,
    passed: bool,
    result: T,
) -> Result<(), Failure> {
    emit_json(
        g,
        &Report {
            command: command.to_string(),
            input_sha256: sha,
            tolerance: *tol,
            passed,
            result,
        },
    )
}

fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| io_failure(path, e))?;
    }
    let bytes = w.into_inner().map_err(|e| io_failure(path, e))?;
    io::write_atomic(path, &bytes).map_err(|e| io_failure(path, e))
}

fn maybe_csv<R: Serialize>(g: &GlobalOpts, rows: &[R]) -> Result<(), Failure> {
    match &g.csv {
        Some(path) => write_csv(path, rows),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct SubspaceRow {
    index: usize,
    dim: usize,
    weight: f64,
}

#[derive(Serialize)]
struct AngleRow {
    i: usize,
    j: usize,
    cos_friedrichs: f64,
    cos_dixmier: f64,
    /// `δ(W_i, W_j)`.
    gap_ij: f64,
    /// `δ(W_j, W_i)`.
    gap_ji: f64,
}

#[derive(Serialize)]
struct AnalyzeResult {
    frame: FrameAnalysis,
    subspaces: Vec<SubspaceRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    angles: Option<Vec<AngleRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    perturbation: Option<PerturbationReport>,
    warnings: Vec<String>,
}

fn analyze(g: &GlobalOpts, tol: &Tolerance, path: &Path, angles: bool, perturb: bool) -> CmdResult {
    let (inst, sha) = read_instance(path, tol)?;
    let operator = if perturb {
        Some(require_operator(&inst, "--perturb")?)
    } else {
        None
    };
    let family = &inst.family;
    let frame = family.frame_bounds(tol)?;
    let rows: Vec<SubspaceRow> = family
        .items()
        .iter()
        .enumerate()
        .map(|(index, it)| SubspaceRow {
            index,
            dim: it.subspace.dim(),
            weight: it.weight,
        })
        .collect();

    let angle_rows = if angles {
        let items = family.items();
        let mut out = Vec::new();
        for i in 0..items.len() {
            for j in i + 1..items.len() {
                let (m, n) = (&items[i].subspace, &items[j].subspace);
                out.push(AngleRow {
                    i,
                    j,
                    cos_friedrichs: subspaces::cos_friedrichs(m, n, tol)?,
                    cos_dixmier: subspaces::cos_dixmier(m, n)?,
                    gap_ij: subspaces::gap(m, n)?,
                    gap_ji: subspaces::gap(n, m)?,
                });
            }
        }
        Some(out)
    } else {
        None
    };

    let perturbation = match &operator {
        Some(t) => Some(perturbation::run_pipeline(
            t,
            family,
            None,
            WeightStrategy::default(),
            tol,
        )?),
        None => None,
    };
    let passed = perturbation.as_ref().is_none_or(PerturbationReport::passed);

    match &angle_rows {
        Some(a) => maybe_csv(g, a)?,
        None => maybe_csv(g, &rows)?,
    }
    emit_report(
        g,
        "analyze",
        Some(sha),
        tol,
        passed,
        AnalyzeResult {
            frame,
            subspaces: rows,
            angles: angle_rows,
            perturbation,
            warnings: inst.warnings.clone(),
        },
    )?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}

#[derive(Serialize)]
struct PerturbRow {
    index: usize,
    gamma: f64,
    norm: f64,
    ratio: Option<f64>,
    window_lo: f64,
    window_hi: f64,
    weight: f64,
}

#[derive(Serialize)]
struct Violation {
    error: String,
    index: usize,
    ratio: f64,
    a_over_b: f64,
    local: perturbation::LocalQuantities,
    condition: perturbation::ConditionConstant,
}

fn perturb_cmd(
    g: &GlobalOpts,
    tol: &Tolerance,
    path: &Path,
    a: Option<f64>,
    b: Option<f64>,
    strategy: WeightStrategy,
) -> CmdResult {
    let (inst, sha) = read_instance(path, tol)?;
    let t = require_operator(&inst, "perturb")?;
    let local = perturbation::local_quantities(&t, &inst.family, tol)?;
    let condition = perturbation::condition_c(&local);
    let bounds = match (a, b) {
        (None, None) => None,
        (Some(a), Some(b)) => Some((a, b)),
        (None, Some(b)) => Some((condition.c * b, b)),
        (Some(_), None) => return Err(usage("--A requires --B")),
    };
    match perturbation::run_pipeline(&t, &inst.family, bounds, strategy, tol) {
        Ok(report) => {
            let rows: Vec<PerturbRow> = report
                .local
                .entries
                .iter()
                .zip(&report.weights.windows)
                .enumerate()
                .map(|(index, (e, w))| PerturbRow {
                    index,
                    gamma: e.gamma,
                    norm: e.norm,
                    ratio: e.ratio,
                    window_lo: w.lo,
                    window_hi: w.hi,
                    weight: w.chosen,
                })
                .collect();
            maybe_csv(g, &rows)?;
            let passed = report.passed();
            emit_report(g, "perturb", Some(sha), tol, passed, report)?;
            Ok(if passed { EXIT_OK } else { EXIT_FAILED })
        }
        Err(Error::HypothesisViolation {
            index,
            ratio,
            a_over_b,
        }) => {
            let message = format!(
                "hypothesis violated at index {index}: A/B = {a_over_b} exceeds gamma^2/||TP||^2 = {ratio}"
            );
            emit_report(
                g,
                "perturb",
                Some(sha),
                tol,
                false,
                Violation {
                    error: message.clone(),
                    index,
                    ratio,
                    a_over_b,
                    local,
                    condition,
                },
            )?;
            Err(Failure {
                code: EXIT_HYPOTHESIS,
                message,
            })
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum VerifyResult {
    Random(SuiteOutcome),
    Instance(InstanceVerification),
}

fn verify(
    g: &GlobalOpts,
    tol: &Tolerance,
    instance: Option<&Path>,
    random: Option<&str>,
    suite: Suite,
) -> CmdResult {
    let (result, sha, passed) = match (instance, random) {
        (Some(path), None) => {
            let (inst, sha) = read_instance(path, tol)?;
            let op = require_operator(&inst, "verify")?;
            let v = suites::verify_instance(suite, &op, &inst.family, tol)?;
            let passed = v.passed();
            (VerifyResult::Instance(v), Some(sha), passed)
        }
        (None, Some(spec_text)) => {
            let mut spec: RandomSpec = spec_text.parse()?;
            if !spec_text.contains("seed") {
                spec.seed = g.seed;
            }
            let outcome = suites::run_random(suite, &spec, tol)?;
            maybe_csv(g, &outcome.failures)?;
            for f in &outcome.failures {
                eprintln!("failed trial: seed={} dim={} {}", f.seed, f.dim, f.detail);
            }
            let passed = outcome.all_passed();
            (VerifyResult::Random(outcome), None, passed)
        }
        _ => return Err(usage("verify needs an instance path or --random")),
    };
    emit_report(g, "verify", sha, tol, passed, result)?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}

fn example(
    g: &GlobalOpts,
    tol: &Tolerance,
    blocks: usize,
    theta0: f64,
    plot: Option<&Path>,
) -> CmdResult {
    let spec = BlockExampleSpec::geometric(blocks, theta0)?;
    let ex = instances::block_example(&spec);
    if let Some(path) = &g.csv {
        write_csv(path, &suites::example_gamma_table(&spec, tol)?)?;
    }
    if let Some(path) = plot {
        let ks: Vec<usize> = (1..=blocks).collect();
        write_csv(path, &suites::example_sweep(&ks, theta0, tol)?)?;
    }
    emit_json(g, &InstanceFile::from_parts(&ex.family, Some(&ex.operator)))?;
    Ok(EXIT_OK)
}
