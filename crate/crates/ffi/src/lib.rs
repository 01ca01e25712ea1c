//! C ABI over the hyperlab engine.
//!
//! Models are opaque `HlModel` handles created by [`hl_model_new`] and
//! released with [`hl_model_free`]. Every fallible call returns an
//! [`HlStatus`]; on failure [`hl_last_error`] describes the error for the
//! calling thread. Strings returned by the library are freed with
//! [`hl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hyperlab::catalog::{
    branch_value_with, instantiate, riccati_shape_evolution_with, Ambient, Branch, Family,
    ModelInstance, ModelSpec,
};
use hyperlab::hopf::{
    check_l_a_commute, check_nabla_xi_l, check_phi_l_commute, decompose_a_xi, Subspace,
};
use hyperlab::lemma::{contradiction_certificate, pointwise_commutator_norm, CertificateVerdict};
use hyperlab::runner::{verify, Check, VerifyOptions};
use hyperlab::GeometryError;

/// Result codes. `HL_STATUS_OK` is zero; everything else is an error.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidSpec = 3,
    DimensionMismatch = 4,
    Domain = 5,
    FocalPoint = 6,
    OracleMismatch = 7,
    Unsupported = 8,
    BufferTooSmall = 9,
    Internal = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlAmbient {
    ProjectiveSpace = 0,
    HyperbolicSpace = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlFamily {
    A0 = 0,
    A1 = 1,
    A2 = 2,
    B = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlCheck {
    /// `phi l = l phi`
    PhiLCommute = 0,
    /// `lA = Al`
    LACommute = 1,
    /// `nabla_xi l = 0`, type A models only
    NablaXiL = 2,
    /// `A xi = alpha xi`, reported as the norm of the non-Hopf part
    Hopf = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlSubspace {
    KerEta = 0,
    SpanXi = 1,
    All = 2,
}

/// Opaque model handle.
pub struct HlModel {
    inner: ModelInstance,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HlCertificate {
    pub factor: f64,
    pub sum_of_squares: f64,
    pub discriminant: f64,
    pub factor_vanishes: bool,
    pub factor_branch_rejected: bool,
    pub witnessed: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &GeometryError) -> HlStatus {
    match err {
        GeometryError::DimensionMismatch { .. } => HlStatus::DimensionMismatch,
        GeometryError::InvalidSpec(_) => HlStatus::InvalidSpec,
        GeometryError::Domain(_)
        | GeometryError::ZeroCurvature
        | GeometryError::Precondition(_) => HlStatus::Domain,
        GeometryError::FocalPoint { .. } => HlStatus::FocalPoint,
        GeometryError::OracleMismatch { .. } => HlStatus::OracleMismatch,
        GeometryError::Unsupported(_) => HlStatus::Unsupported,
        GeometryError::InvalidSpace(_)
        | GeometryError::DegenerateSeed { .. }
        | GeometryError::NotSymmetric { .. } => HlStatus::Internal,
    }
}

/// Runs `f`, recording errors and panics for [`hl_last_error`].
fn guard(f: impl FnOnce() -> Result<(), (HlStatus, String)>) -> HlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HlStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HlStatus::Internal
        }
    }
}

fn geo(err: GeometryError) -> (HlStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (HlStatus, String) {
    (HlStatus::NullPointer, format!("{what} is null"))
}

fn model<'a>(m: *const HlModel) -> Result<&'a ModelInstance, (HlStatus, String)> {
    // SAFETY: callers pass a handle from hl_model_new that has not been freed.
    unsafe { m.as_ref() }
        .map(|m| &m.inner)
        .ok_or_else(|| null("model"))
}

fn write<T>(out: *mut T, value: T) -> Result<(), (HlStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: non-null and, per the API contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

fn tolerance(tol: f64) -> Result<f64, (HlStatus, String)> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(tol)
    } else {
        Err((
            HlStatus::InvalidArgument,
            format!("tolerance must be finite and nonnegative, got {tol}"),
        ))
    }
}

/// Builds a model. `radius` is ignored when NaN and `k` when negative.
///
/// # Safety
/// `out` must be valid for writes. The handle written there must be
/// released with [`hl_model_free`].
#[no_mangle]
pub unsafe extern "C" fn hl_model_new(
    ambient: HlAmbient,
    n: u32,
    c: f64,
    family: HlFamily,
    radius: f64,
    k: i32,
    flip_normal: bool,
    seed: u64,
    out: *mut *mut HlModel,
) -> HlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let ambient = match ambient {
            HlAmbient::ProjectiveSpace => Ambient::CP,
            HlAmbient::HyperbolicSpace => Ambient::CH,
        };
        let family = match family {
            HlFamily::A0 => Family::A0,
            HlFamily::A1 => Family::A1,
            HlFamily::A2 => Family::A2,
            HlFamily::B => Family::B,
        };
        let mut spec = ModelSpec::new(ambient, n as usize, family).c(c);
        if !radius.is_nan() {
            spec = spec.radius(radius);
        }
        if k >= 0 {
            spec = spec.k(k as usize);
        }
        if flip_normal {
            spec = spec.flipped();
        }
        let inner = instantiate(&spec, seed).map_err(geo)?;
        write(out, Box::into_raw(Box::new(HlModel { inner })))
    })
}

/// Releases a model. Null is a no-op.
///
/// # Safety
/// `model` must come from [`hl_model_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hl_model_free(model: *mut HlModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Real dimension `2n - 1` of the tangent space.
///
/// # Safety
/// `model` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hl_model_dim(model: *const HlModel, out: *mut usize) -> HlStatus {
    guard(|| write(out, self::model(model)?.ctx.dim()))
}

/// Hopf principal curvature `alpha`.
///
/// # Safety
/// `model` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hl_model_alpha(model: *const HlModel, out: *mut f64) -> HlStatus {
    guard(|| write(out, self::model(model)?.spectral.alpha))
}

/// Copies the shape operator, row-major, into `buf` of `len` doubles
/// (at least `dim * dim`).
///
/// # Safety
/// `model` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn hl_model_shape(
    model: *const HlModel,
    buf: *mut f64,
    len: usize,
) -> HlStatus {
    guard(|| {
        let a = self::model(model)?.ctx.shape();
        let d = a.nrows();
        if buf.is_null() {
            return Err(null("buffer"));
        }
        if len < d * d {
            return Err((
                HlStatus::BufferTooSmall,
                format!("need {} doubles, got {len}", d * d),
            ));
        }
        let out = std::slice::from_raw_parts_mut(buf, d * d);
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = a[(i, j)];
            }
        }
        Ok(())
    })
}

/// Evaluates one identity. `residual` and `pass` may be null.
///
/// # Safety
/// `model` must be a live handle; non-null outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hl_model_check(
    model: *const HlModel,
    check: HlCheck,
    subspace: HlSubspace,
    tol: f64,
    residual: *mut f64,
    pass: *mut bool,
) -> HlStatus {
    guard(|| {
        let inst = self::model(model)?;
        let tol = tolerance(tol)?;
        let subspace = match subspace {
            HlSubspace::KerEta => Subspace::KerEta,
            HlSubspace::SpanXi => Subspace::SpanXi,
            HlSubspace::All => Subspace::All,
        };
        let ctx = &inst.ctx;
        let (r, ok) = match check {
            HlCheck::PhiLCommute => {
                let rep = check_phi_l_commute(ctx, subspace, tol);
                (rep.residual, rep.pass)
            }
            HlCheck::LACommute => {
                let rep = check_l_a_commute(ctx, subspace, tol);
                (rep.residual, rep.pass)
            }
            HlCheck::NablaXiL => {
                let rep =
                    check_nabla_xi_l(ctx, inst.connection.as_ref(), subspace, tol).map_err(geo)?;
                (rep.residual, rep.pass)
            }
            HlCheck::Hopf => {
                let beta = decompose_a_xi(ctx).beta;
                (beta, beta <= tol)
            }
        };
        if !residual.is_null() {
            residual.write(r);
        }
        if !pass.is_null() {
            pass.write(ok);
        }
        Ok(())
    })
}

/// Runs every check on the model and writes the JSON report (without a
/// timestamp) to `out`. Free it with [`hl_string_free`]. `all_pass` may be
/// null.
///
/// # Safety
/// `model` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hl_model_verify_json(
    model: *const HlModel,
    tol: f64,
    out: *mut *mut c_char,
    all_pass: *mut bool,
) -> HlStatus {
    guard(|| {
        let inst = self::model(model)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let report = verify(&VerifyOptions {
            spec: inst.spec.clone(),
            seed: inst.seed,
            checks: Check::ALL.to_vec(),
            tolerance: tolerance(tol)?,
        })
        .map_err(geo)?;
        let json =
            CString::new(report.to_json()).map_err(|e| (HlStatus::Internal, e.to_string()))?;
        if !all_pass.is_null() {
            all_pass.write(report.all_pass);
        }
        out.write(json.into_raw());
        Ok(())
    })
}

/// Releases a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Integrates `lambda' = -(lambda^2 + kappa)` to radius `r`. With
/// `lambda0` NaN the start is focal (`lambda ~ 1/r` near 0); otherwise the
/// start is `(r0, lambda0)`. `step <= 0` selects the default step.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hl_riccati(
    kappa: f64,
    r: f64,
    r0: f64,
    lambda0: f64,
    step: f64,
    out: *mut f64,
) -> HlStatus {
    guard(|| {
        let step = if step > 0.0 {
            step
        } else {
            hyperlab::catalog::RICCATI_STEP
        };
        let value = if lambda0.is_nan() {
            branch_value_with(kappa, Branch::Focal, r, step)
        } else {
            riccati_shape_evolution_with(kappa, r, (r0, lambda0), step)
        }
        .map_err(geo)?;
        write(out, value)
    })
}

/// Norm of `phi l - l phi` on `span{U, phiU}` at an `alpha = 0` point.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hl_pointwise(c: f64, beta: f64, out: *mut f64) -> HlStatus {
    guard(|| write(out, pointwise_commutator_norm(c, beta).map_err(geo)?))
}

/// Arithmetic certificate at `(c, alpha, beta)`. `w1_norm_sq` is ignored
/// when NaN.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hl_certificate(
    c: f64,
    alpha: f64,
    beta: f64,
    w1_norm_sq: f64,
    out: *mut HlCertificate,
) -> HlStatus {
    guard(|| {
        let w1 = (!w1_norm_sq.is_nan()).then_some(w1_norm_sq);
        let cert = contradiction_certificate(c, alpha, beta, w1).map_err(geo)?;
        write(
            out,
            HlCertificate {
                factor: cert.factor,
                sum_of_squares: cert.sum_of_squares,
                discriminant: cert.discriminant,
                factor_vanishes: cert.factor_vanishes,
                factor_branch_rejected: cert.factor_branch_rejected,
                witnessed: cert.verdict == CertificateVerdict::Witnessed,
            },
        )
    })
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn hl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hl_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version contains NUL"),
        };
    VERSION.as_ptr()
}
