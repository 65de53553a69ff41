//! C interface to `roughpaths`.
//!
//! Every function returns an [`RpStatus`]. On failure the message is kept per thread
//! and can be read with [`rp_last_error_message`]. Objects are opaque handles that the
//! caller releases with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use roughpaths::error::Error;
use roughpaths::gaussian::{CovarianceModel, GaussianSampler};
use roughpaths::harness::{run_rate, ExperimentSpec};
use roughpaths::path::SampledPath;
use roughpaths::rde::SchemeKind;
use roughpaths::signature::path_signature;
use roughpaths::tensor::TensorElement;
use roughpaths::words::{generating_set, is_lyndon, parse_multiset, shuffle, Word};

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Singular = 3,
    Numerical = 4,
    Divergence = 5,
    Unsupported = 6,
    Parse = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RpModel {
    Bm = 0,
    Fbm = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RpScheme {
    WongZakai = 0,
    SimplifiedEuler = 1,
    Euler = 2,
}

/// Element of the truncated tensor algebra.
pub struct RpTensor(TensorElement);

/// Exact Gaussian path sampler on a uniform grid.
pub struct RpSampler(GaussianSampler);

/// Convergence-rate experiment with the nonlinear preset and median statistic.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct RpRateConfig {
    pub model: RpModel,
    /// Ignored for Brownian motion.
    pub hurst: f64,
    pub scheme: RpScheme,
    /// Scheme level for the Euler schemes.
    pub level: usize,
    pub meshes: *const usize,
    pub n_meshes: usize,
    pub ref_mesh: usize,
    pub mc: usize,
    pub seed: u64,
    pub substeps: usize,
    /// 0 selects a single thread.
    pub workers: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RpRateResult {
    /// NaN when the fit is degenerate.
    pub slope: f64,
    pub intercept: f64,
    pub half_width: f64,
    pub target: f64,
    pub degenerate: bool,
    pub passed: bool,
    pub excluded: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(RpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Contract(_) => RpStatus::InvalidArgument,
            Error::Singular(_) => RpStatus::Singular,
            Error::Numerical(_) => RpStatus::Numerical,
            Error::Divergence { .. } => RpStatus::Divergence,
            Error::Unsupported(_) => RpStatus::Unsupported,
            Error::Parse(_) => RpStatus::Parse,
            Error::Io(_) => RpStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

fn null(what: &str) -> Failure {
    Failure(RpStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> RpStatus {
    let (status, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => (RpStatus::Ok, String::new()),
        Ok(Err(Failure(s, m))) => (s, m),
        Err(_) => (RpStatus::Panic, "internal panic".to_string()),
    };
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
    status
}

unsafe fn slice_in<'a, T>(p: *const T, n: usize, what: &str) -> FfiResult<&'a [T]> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, n))
}

unsafe fn str_in<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(RpStatus::Parse, format!("{what} is not UTF-8")))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Copies `text` with a trailing NUL. `needed` receives the full size including the NUL.
unsafe fn write_str(text: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> FfiResult<()> {
    let size = text.len() + 1;
    if let Some(n) = needed.as_mut() {
        *n = size;
    }
    if len < size || buf.is_null() {
        return Err(Failure(
            RpStatus::BufferTooSmall,
            format!("buffer of {len} bytes, {size} needed"),
        ));
    }
    ptr::copy_nonoverlapping(text.as_ptr().cast::<c_char>(), buf, text.len());
    *buf.add(text.len()) = 0;
    Ok(())
}

fn boxed<T>(out: *mut *mut T, value: T) -> FfiResult<()> {
    // SAFETY: `out` was checked by the caller of this helper.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

fn model(kind: RpModel, hurst: f64, dim: usize) -> FfiResult<CovarianceModel> {
    Ok(match kind {
        RpModel::Bm => CovarianceModel::bm(dim)?,
        RpModel::Fbm => CovarianceModel::fbm(hurst, dim)?,
    })
}

/// Length in bytes of the last error message on this thread, without the NUL.
#[no_mangle]
pub extern "C" fn rp_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len())
}

/// Copies the last error message of this thread into `buf`.
///
/// # Safety
/// `buf` must point to `len` writable bytes; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn rp_last_error_message(buf: *mut c_char, len: usize, needed: *mut usize) -> RpStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    match write_str(&msg, buf, len, needed) {
        Ok(()) => RpStatus::Ok,
        Err(Failure(s, _)) => s,
    }
}

/// Truncated exponential of a vector `v` of length `dim`.
///
/// # Safety
/// `v` must point to `dim` doubles and `out` to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn rp_tensor_exp(v: *const f64, dim: usize, depth: usize, out: *mut *mut RpTensor) -> RpStatus {
    guard(|| {
        out_ref(out, "out")?;
        let v = slice_in(v, dim, "v")?;
        boxed(out, RpTensor(TensorElement::exp(v, depth)?))
    })
}

/// Signature up to `depth` of the piecewise-linear path through `n_points` samples.
/// `values` is row-major, `dim` entries per time.
///
/// # Safety
/// `times` must hold `n_points` doubles and `values` `n_points * dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn rp_tensor_signature(
    times: *const f64,
    values: *const f64,
    n_points: usize,
    dim: usize,
    depth: usize,
    out: *mut *mut RpTensor,
) -> RpStatus {
    guard(|| {
        out_ref(out, "out")?;
        let n_values = n_points
            .checked_mul(dim)
            .ok_or_else(|| Failure(RpStatus::InvalidArgument, "size overflow".into()))?;
        let t = slice_in(times, n_points, "times")?.to_vec();
        let v = slice_in(values, n_values, "values")?.to_vec();
        let x = SampledPath::new(t, v, dim)?;
        let sig = path_signature(&x, depth, x.start(), x.end())?;
        boxed(out, RpTensor(sig))
    })
}

/// Truncated tensor product `a ⊗ b`.
///
/// # Safety
/// `a` and `b` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn rp_tensor_mul(a: *const RpTensor, b: *const RpTensor, out: *mut *mut RpTensor) -> RpStatus {
    guard(|| {
        out_ref(out, "out")?;
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b = b.as_ref().ok_or_else(|| null("b"))?;
        boxed(out, RpTensor(a.0.mul(&b.0)?))
    })
}

/// # Safety
/// `a` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_tensor_inverse(a: *const RpTensor, out: *mut *mut RpTensor) -> RpStatus {
    guard(|| {
        out_ref(out, "out")?;
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        boxed(out, RpTensor(a.0.inverse()?))
    })
}

/// # Safety
/// `a` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_tensor_log(a: *const RpTensor, out: *mut *mut RpTensor) -> RpStatus {
    guard(|| {
        out_ref(out, "out")?;
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        boxed(out, RpTensor(a.0.log()?))
    })
}

/// Dimension, depth and total coefficient count (level 0 included).
///
/// # Safety
/// `t` must be a live handle; any output pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn rp_tensor_shape(
    t: *const RpTensor,
    dim: *mut usize,
    depth: *mut usize,
    len: *mut usize,
) -> RpStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| null("t"))?;
        if let Some(d) = dim.as_mut() {
            *d = t.0.dim();
        }
        if let Some(n) = depth.as_mut() {
            *n = t.0.depth();
        }
        if let Some(l) = len.as_mut() {
            *l = t.0.csv_row().len();
        }
        Ok(())
    })
}

/// Level-major coefficients, lexicographic within each level, level 0 first.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rp_tensor_coefficients(t: *const RpTensor, buf: *mut f64, len: usize) -> RpStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| null("t"))?;
        let row = t.0.csv_row();
        if len < row.len() || buf.is_null() {
            return Err(Failure(
                RpStatus::BufferTooSmall,
                format!("buffer of {len} doubles, {} needed", row.len()),
            ));
        }
        ptr::copy_nonoverlapping(row.as_ptr(), buf, row.len());
        Ok(())
    })
}

/// Coefficient at a 0-based multi-index of length `n` (n = 0 is the scalar part).
///
/// # Safety
/// `multi` must hold `n` entries.
#[no_mangle]
pub unsafe extern "C" fn rp_tensor_coefficient(
    t: *const RpTensor,
    multi: *const usize,
    n: usize,
    out: *mut f64,
) -> RpStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let t = t.as_ref().ok_or_else(|| null("t"))?;
        *out = t.0.coefficient(slice_in(multi, n, "multi")?)?;
        Ok(())
    })
}

/// `max_n (n! |level n|)^(1/n)`.
///
/// # Safety
/// `t` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_tensor_homogeneous_norm(t: *const RpTensor, out: *mut f64) -> RpStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let t = t.as_ref().ok_or_else(|| null("t"))?;
        *out = t.0.homogeneous_norm();
        Ok(())
    })
}

/// # Safety
/// `t` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rp_tensor_free(t: *mut RpTensor) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Shuffle product of two words, formatted as `1*aabc + 1*abac`.
///
/// # Safety
/// `u`, `v` are NUL-terminated; `buf` holds `len` bytes; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn rp_shuffle(
    u: *const c_char,
    v: *const c_char,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> RpStatus {
    guard(|| {
        let u: Word = str_in(u, "u")?.parse()?;
        let v: Word = str_in(v, "v")?.parse()?;
        write_str(&shuffle(&u, &v).to_string(), buf, len, needed)
    })
}

/// # Safety
/// `w` is NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rp_is_lyndon(w: *const c_char, out: *mut bool) -> RpStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = is_lyndon(&str_in(w, "w")?.parse()?)?;
        Ok(())
    })
}

/// Generating set for the letter multiset written as a word (`aabc`), space-separated.
///
/// # Safety
/// As for [`rp_shuffle`].
#[no_mangle]
pub unsafe extern "C" fn rp_generating_set(
    multiset: *const c_char,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> RpStatus {
    guard(|| {
        let counts = parse_multiset(str_in(multiset, "multiset")?)?;
        let words: Vec<String> = generating_set(&counts)?.iter().map(Word::to_string).collect();
        write_str(&words.join(" "), buf, len, needed)
    })
}

/// Sampler for one-dimensional components on the grid `j/k`.
///
/// # Safety
/// `out` must be a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn rp_sampler_new(kind: RpModel, hurst: f64, k: usize, out: *mut *mut RpSampler) -> RpStatus {
    guard(|| {
        out_ref(out, "out")?;
        let m = model(kind, hurst, 1)?;
        boxed(out, RpSampler(GaussianSampler::new(&m, k)?))
    })
}

/// Writes the `k + 1` values of component `comp` of trajectory `traj`.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rp_sampler_sample(
    s: *const RpSampler,
    seed: u64,
    traj: u64,
    comp: usize,
    buf: *mut f64,
    len: usize,
) -> RpStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("s"))?;
        let need = s.0.mesh() + 1;
        if len < need || buf.is_null() {
            return Err(Failure(
                RpStatus::BufferTooSmall,
                format!("buffer of {len} doubles, {need} needed"),
            ));
        }
        let v = s.0.sample_component(seed, traj, comp);
        ptr::copy_nonoverlapping(v.as_ptr(), buf, need);
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rp_sampler_free(s: *mut RpSampler) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Runs a Monte-Carlo convergence-rate experiment.
///
/// # Safety
/// `cfg.meshes` must hold `cfg.n_meshes` entries.
#[no_mangle]
pub unsafe extern "C" fn rp_run_rate(cfg: *const RpRateConfig, out: *mut RpRateResult) -> RpStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        let mut spec = ExperimentSpec::new(model(cfg.model, cfg.hurst, 2)?);
        spec.meshes = slice_in(cfg.meshes, cfg.n_meshes, "meshes")?.to_vec();
        spec.ref_mesh = cfg.ref_mesh;
        spec.mc = cfg.mc;
        spec.seed = cfg.seed;
        spec.substeps = cfg.substeps;
        spec.workers = cfg.workers.max(1);
        spec.level = cfg.level;
        spec.scheme = match cfg.scheme {
            RpScheme::WongZakai => SchemeKind::WongZakaiOde,
            RpScheme::SimplifiedEuler => SchemeKind::SimplifiedEulerN,
            RpScheme::Euler => SchemeKind::EulerN,
        };
        let r = run_rate(&spec)?;
        let fit = r.fit;
        *out = RpRateResult {
            slope: fit.map_or(f64::NAN, |f| f.slope),
            intercept: fit.map_or(f64::NAN, |f| f.intercept),
            half_width: fit.map_or(f64::NAN, |f| f.half_width),
            target: r.target,
            degenerate: r.is_degenerate(),
            passed: r.passes(),
            excluded: r.excluded,
        };
        Ok(())
    })
}
