//! C ABI over `fusionframe`.
//!
//! Objects cross the boundary as opaque handles (`FfMatrix`, `FfSubspace`,
//! `FfFamily`) owned by the caller and released with the matching `*_free`.
//! Every fallible call returns an [`FfStatus`]; on failure the message is
//! available from [`ff_last_error`] on the same thread. Matrices are passed
//! row-major as separate real and imaginary arrays; a null imaginary array
//! means a real matrix.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fusionframe::instances::{self, BlockExampleSpec};
use fusionframe::io::InstanceFile;
use fusionframe::numerics::{self, c64};
use fusionframe::perturbation::{self, WeightStrategy};
use fusionframe::{subspaces, Classification, Error, Matrix, Subspace, Tolerance, WeightedFamily};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    NonFinite = 4,
    NotPositiveSemidefinite = 5,
    EmptyFamily = 6,
    HypothesisViolation = 7,
    Computation = 8,
    Parse = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfClassification {
    FusionFrame = 0,
    FusionFrameSequence = 1,
    Degenerate = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfWeightStrategy {
    GeometricMid = 0,
    LowerEdge = 1,
    UpperEdge = 2,
}

/// Numerical tolerances; see [`ff_tolerance_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FfTolerance {
    /// Singular values at or below `rank_tol_factor * max(m, n) * sigma_max` count as zero.
    pub rank_tol_factor: f64,
    pub cmp_tol: f64,
    /// Principal cosines within this of 1 count as a shared direction.
    pub intersection_tol: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FfFrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub span_dim: usize,
    pub ambient_dim: usize,
    pub classification: FfClassification,
}

/// Dense complex matrix.
pub struct FfMatrix {
    inner: Matrix,
}

/// Subspace held by an orthonormal basis.
pub struct FfSubspace {
    inner: Subspace,
}

/// Weighted family of subspaces of one ambient space.
pub struct FfFamily {
    inner: WeightedFamily,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(FfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::DimensionMismatch { .. } => FfStatus::DimensionMismatch,
            Error::InvalidInput(_) => FfStatus::InvalidInput,
            Error::NonFinite { .. } => FfStatus::NonFinite,
            Error::NotPositiveSemidefinite(_) => FfStatus::NotPositiveSemidefinite,
            Error::EmptyFamily => FfStatus::EmptyFamily,
            Error::HypothesisViolation { .. } => FfStatus::HypothesisViolation,
            Error::Computation(_) => FfStatus::Computation,
            Error::Parse { .. } => FfStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(FfStatus::NullPointer, format!("{what} is null"))
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            FfStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            FfStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    *out = value;
    Ok(())
}

fn tolerance(t: FfTolerance) -> Result<Tolerance, Failure> {
    Ok(Tolerance::new(
        t.rank_tol_factor,
        t.cmp_tol,
        t.intersection_tol,
    )?)
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ff_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn ff_tolerance_default() -> FfTolerance {
    let t = Tolerance::default();
    FfTolerance {
        rank_tol_factor: t.rank_tol_factor,
        cmp_tol: t.cmp_tol,
        intersection_tol: t.intersection_tol,
    }
}

// ---- matrices ----

/// Copies a row-major `rows x cols` matrix. `im` may be null.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `rows * cols` doubles.
#[no_mangle]
pub unsafe extern "C" fn ff_matrix_new(
    rows: usize,
    cols: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut FfMatrix,
) -> FfStatus {
    guard(|| {
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Failure(FfStatus::InvalidInput, "rows * cols overflows".into()))?;
        if re.is_null() && len > 0 {
            return Err(null("re"));
        }
        let re = if len > 0 {
            std::slice::from_raw_parts(re, len)
        } else {
            &[]
        };
        let im = (!im.is_null() && len > 0).then(|| std::slice::from_raw_parts(im, len));
        let m = Matrix::from_fn(rows, cols, |i, j| {
            let k = i * cols + j;
            c64(re[k], im.map_or(0.0, |v| v[k]))
        });
        numerics::check_finite(&m)?;
        put(out, FfMatrix { inner: m }, "out")
    })
}

/// # Safety
/// `m` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ff_matrix_free(m: *mut FfMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ff_matrix_shape(
    m: *const FfMatrix,
    rows: *mut usize,
    cols: *mut usize,
) -> FfStatus {
    guard(|| {
        let m = get(m, "m")?;
        write(rows, m.inner.nrows(), "rows")?;
        write(cols, m.inner.ncols(), "cols")
    })
}

/// Copies the entries out row-major. `im` may be null.
///
/// # Safety
/// `re` (and `im` when non-null) must have room for `rows * cols` doubles.
#[no_mangle]
pub unsafe extern "C" fn ff_matrix_copy(
    m: *const FfMatrix,
    re: *mut f64,
    im: *mut f64,
) -> FfStatus {
    guard(|| {
        let m = &get(m, "m")?.inner;
        let cols = m.ncols();
        if re.is_null() && !m.is_empty() {
            return Err(null("re"));
        }
        for i in 0..m.nrows() {
            for j in 0..cols {
                let z = m[(i, j)];
                *re.add(i * cols + j) = z.re;
                if !im.is_null() {
                    *im.add(i * cols + j) = z.im;
                }
            }
        }
        Ok(())
    })
}

/// Operator norm.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_norm(m: *const FfMatrix, out: *mut f64) -> FfStatus {
    guard(|| write(out, numerics::operator_norm(&get(m, "m")?.inner)?, "out"))
}

/// Reduced minimum modulus; `+inf` for the zero matrix.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_gamma(m: *const FfMatrix, tol: FfTolerance, out: *mut f64) -> FfStatus {
    guard(|| {
        write(
            out,
            numerics::gamma(&get(m, "m")?.inner, &tolerance(tol)?)?,
            "out",
        )
    })
}

/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_rank(
    m: *const FfMatrix,
    tol: FfTolerance,
    out: *mut usize,
) -> FfStatus {
    guard(|| {
        write(
            out,
            numerics::numerical_rank(&get(m, "m")?.inner, &tolerance(tol)?)?,
            "out",
        )
    })
}

/// Moore-Penrose pseudoinverse as a new handle.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_pinv(
    m: *const FfMatrix,
    tol: FfTolerance,
    out: *mut *mut FfMatrix,
) -> FfStatus {
    guard(|| {
        let p = numerics::pinv(&get(m, "m")?.inner, &tolerance(tol)?)?;
        put(out, FfMatrix { inner: p }, "out")
    })
}

// ---- subspaces ----

/// Column span of `generators`.
///
/// # Safety
/// `generators` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_subspace_span(
    generators: *const FfMatrix,
    tol: FfTolerance,
    out: *mut *mut FfSubspace,
) -> FfStatus {
    guard(|| {
        let s = Subspace::from_generators(&get(generators, "generators")?.inner, &tolerance(tol)?)?;
        put(out, FfSubspace { inner: s }, "out")
    })
}

/// # Safety
/// `s` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ff_subspace_free(s: *mut FfSubspace) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle; `ambient_dim` and `dim` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_subspace_dims(
    s: *const FfSubspace,
    ambient_dim: *mut usize,
    dim: *mut usize,
) -> FfStatus {
    guard(|| {
        let s = &get(s, "s")?.inner;
        write(ambient_dim, s.ambient_dim(), "ambient_dim")?;
        write(dim, s.dim(), "dim")
    })
}

/// Orthonormal basis as a new `ambient_dim x dim` matrix.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_subspace_basis(
    s: *const FfSubspace,
    out: *mut *mut FfMatrix,
) -> FfStatus {
    guard(|| {
        let b = get(s, "s")?.inner.basis().clone();
        put(out, FfMatrix { inner: b }, "out")
    })
}

/// Cosine of the Friedrichs angle.
///
/// # Safety
/// `m`, `n` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_cos_friedrichs(
    m: *const FfSubspace,
    n: *const FfSubspace,
    tol: FfTolerance,
    out: *mut f64,
) -> FfStatus {
    guard(|| {
        let c =
            subspaces::cos_friedrichs(&get(m, "m")?.inner, &get(n, "n")?.inner, &tolerance(tol)?)?;
        write(out, c, "out")
    })
}

/// Cosine of the Dixmier (minimal) angle.
///
/// # Safety
/// `m`, `n` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_cos_dixmier(
    m: *const FfSubspace,
    n: *const FfSubspace,
    out: *mut f64,
) -> FfStatus {
    guard(|| {
        write(
            out,
            subspaces::cos_dixmier(&get(m, "m")?.inner, &get(n, "n")?.inner)?,
            "out",
        )
    })
}

/// Gap `sup { dist(x, N) : x in M, |x| = 1 }`.
///
/// # Safety
/// `m`, `n` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_gap(
    m: *const FfSubspace,
    n: *const FfSubspace,
    out: *mut f64,
) -> FfStatus {
    guard(|| {
        write(
            out,
            subspaces::gap(&get(m, "m")?.inner, &get(n, "n")?.inner)?,
            "out",
        )
    })
}

// ---- families ----

/// Empty family in `C^ambient_dim`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ff_family_new(ambient_dim: usize, out: *mut *mut FfFamily) -> FfStatus {
    guard(|| {
        if ambient_dim == 0 {
            return Err(Failure(
                FfStatus::InvalidInput,
                "ambient_dim must be positive".into(),
            ));
        }
        put(
            out,
            FfFamily {
                inner: WeightedFamily::new(ambient_dim),
            },
            "out",
        )
    })
}

/// # Safety
/// `f` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ff_family_free(f: *mut FfFamily) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Appends a copy of `s` with weight `weight > 0`.
///
/// # Safety
/// `f` and `s` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn ff_family_push(
    f: *mut FfFamily,
    s: *const FfSubspace,
    weight: f64,
) -> FfStatus {
    guard(|| {
        let s = get(s, "s")?.inner.clone();
        let f = f.as_mut().ok_or_else(|| null("f"))?;
        Ok(f.inner.push(s, weight)?)
    })
}

/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_family_len(f: *const FfFamily, out: *mut usize) -> FfStatus {
    guard(|| write(out, get(f, "f")?.inner.len(), "out"))
}

/// Weight and subspace of item `index`. Either output may be null.
///
/// # Safety
/// `f` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ff_family_item(
    f: *const FfFamily,
    index: usize,
    weight: *mut f64,
    subspace: *mut *mut FfSubspace,
) -> FfStatus {
    guard(|| {
        let f = &get(f, "f")?.inner;
        let it = f.items().get(index).ok_or_else(|| {
            Failure(
                FfStatus::InvalidInput,
                format!("index {index} out of range for {} items", f.len()),
            )
        })?;
        if !weight.is_null() {
            *weight = it.weight;
        }
        if !subspace.is_null() {
            put(
                subspace,
                FfSubspace {
                    inner: it.subspace.clone(),
                },
                "subspace",
            )?;
        }
        Ok(())
    })
}

/// Optimal frame bounds on the span of the family.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_frame_bounds(
    f: *const FfFamily,
    tol: FfTolerance,
    out: *mut FfFrameBounds,
) -> FfStatus {
    guard(|| {
        let fa = get(f, "f")?.inner.frame_bounds(&tolerance(tol)?)?;
        let classification = match fa.classification {
            Classification::FusionFrame => FfClassification::FusionFrame,
            Classification::FusionFrameSequence => FfClassification::FusionFrameSequence,
            Classification::Degenerate => FfClassification::Degenerate,
        };
        write(
            out,
            FfFrameBounds {
                lower: fa.lower,
                upper: fa.upper,
                span_dim: fa.span_dim,
                ambient_dim: fa.ambient_dim,
                classification,
            },
            "out",
        )
    })
}

// ---- perturbation ----

/// `c = inf γ(T P_{W_i})² / ‖T P_{W_i}‖²`, zero when `T` annihilates some `W_i`.
///
/// # Safety
/// `t`, `f` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_condition_c(
    t: *const FfMatrix,
    f: *const FfFamily,
    tol: FfTolerance,
    out: *mut f64,
) -> FfStatus {
    guard(|| {
        let q = perturbation::local_quantities(
            &get(t, "t")?.inner,
            &get(f, "f")?.inner,
            &tolerance(tol)?,
        )?;
        write(out, perturbation::condition_c(&q).c, "out")
    })
}

/// The family `(T(W_i), v_i)` with weights chosen for target bounds
/// `0 < a <= b`. Fails with `FF_STATUS_HYPOTHESIS_VIOLATION` when `a/b`
/// exceeds the condition constant.
///
/// # Safety
/// `t`, `f` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_perturb(
    t: *const FfMatrix,
    f: *const FfFamily,
    a: f64,
    b: f64,
    strategy: FfWeightStrategy,
    tol: FfTolerance,
    out: *mut *mut FfFamily,
) -> FfStatus {
    guard(|| {
        let (t, f, tol) = (&get(t, "t")?.inner, &get(f, "f")?.inner, tolerance(tol)?);
        let strategy = match strategy {
            FfWeightStrategy::GeometricMid => WeightStrategy::GeometricMid,
            FfWeightStrategy::LowerEdge => WeightStrategy::LowerEdge,
            FfWeightStrategy::UpperEdge => WeightStrategy::UpperEdge,
        };
        let q = perturbation::local_quantities(t, f, &tol)?;
        let w = perturbation::construct_weights(&q, &f.weights(), a, b, strategy)?;
        let p = perturbation::perturb(t, f, &w, &tol)?;
        put(out, FfFamily { inner: p }, "out")
    })
}

// ---- instances ----

/// The block example with `blocks` blocks and angles `theta0 / 2^k`.
/// `operator` may be null.
///
/// # Safety
/// `family` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ff_example(
    blocks: usize,
    theta0: f64,
    family: *mut *mut FfFamily,
    operator: *mut *mut FfMatrix,
) -> FfStatus {
    guard(|| {
        let ex = instances::block_example(&BlockExampleSpec::geometric(blocks, theta0)?);
        if family.is_null() {
            return Err(null("family"));
        }
        if !operator.is_null() {
            put(operator, FfMatrix { inner: ex.operator }, "operator")?;
        }
        put(family, FfFamily { inner: ex.family }, "family")
    })
}

/// Parses a JSON instance. `*operator` is set to null when the instance has
/// none; `operator` itself may be null to ignore it.
///
/// # Safety
/// `json` must be a NUL-terminated UTF-8 string and `family` writable.
#[no_mangle]
pub unsafe extern "C" fn ff_instance_from_json(
    json: *const c_char,
    tol: FfTolerance,
    family: *mut *mut FfFamily,
    operator: *mut *mut FfMatrix,
) -> FfStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(FfStatus::Parse, format!("json is not UTF-8: {e}")))?;
        let inst = InstanceFile::parse(text)?.load(&tolerance(tol)?)?;
        if family.is_null() {
            return Err(null("family"));
        }
        if !operator.is_null() {
            *operator = match inst.operator {
                Some(m) => Box::into_raw(Box::new(FfMatrix { inner: m })),
                None => ptr::null_mut(),
            };
        }
        put(family, FfFamily { inner: inst.family }, "family")
    })
}
