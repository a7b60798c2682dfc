//! C ABI over the core library: opaque curve handles, plain status codes, and
//! caller-provided output buffers. Every entry point catches panics and maps
//! library errors onto `LdStatus`.

use landelta::capacity::{capacity_of, CapacitySet};
use landelta::geometry::{build_circle, build_fourier_curve, build_segment, sub_arc, Curve};
use landelta::landau;
use landelta::spectral::{self, Side, StrengthFunction};
use landelta::toeplitz;
use num_complex::Complex64;
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdStatus {
    Ok = 0,
    InvalidArgument = 1,
    GeometryError = 2,
    OnLandauLevel = 3,
    NoEigenvalues = 4,
    NumericalError = 5,
    BufferTooSmall = 6,
    InternalPanic = 7,
}

/// Opaque closed-curve handle.
pub struct LdCurve {
    inner: Curve,
}

/// Which side of a Landau level a cluster is requested on.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdSide {
    Above = 0,
    Below = 1,
}

fn guard<F: FnOnce() -> LdStatus>(f: F) -> LdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => LdStatus::InternalPanic,
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ld_status_message(status: LdStatus) -> *const std::os::raw::c_char {
    let msg: &'static [u8] = match status {
        LdStatus::Ok => b"ok\0",
        LdStatus::InvalidArgument => b"invalid argument\0",
        LdStatus::GeometryError => b"geometry construction failed\0",
        LdStatus::OnLandauLevel => b"spectral parameter on a Landau level\0",
        LdStatus::NoEigenvalues => b"no eigenvalues found on the requested side\0",
        LdStatus::NumericalError => b"numerical failure\0",
        LdStatus::BufferTooSmall => b"output buffer too small\0",
        LdStatus::InternalPanic => b"internal panic\0",
    };
    msg.as_ptr() as *const std::os::raw::c_char
}

/// Build a circle of the given center, radius, and panel count.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn ld_curve_circle(
    center_x: f64,
    center_y: f64,
    radius: f64,
    n_panels: usize,
    out: *mut *mut LdCurve,
) -> LdStatus {
    if out.is_null() {
        return LdStatus::InvalidArgument;
    }
    guard(|| match build_circle([center_x, center_y], radius, n_panels) {
        Ok(curve) => {
            unsafe { *out = Box::into_raw(Box::new(LdCurve { inner: curve })) };
            LdStatus::Ok
        }
        Err(_) => LdStatus::GeometryError,
    })
}

/// Build a trigonometric star-shaped curve
/// r(theta) = base_radius + sum_k cos_coef[k] cos((k+1) theta) + sin_coef[k] sin((k+1) theta).
///
/// # Safety
/// Coefficient pointers must reference arrays of the stated lengths (or be
/// null when the length is zero); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ld_curve_fourier(
    center_x: f64,
    center_y: f64,
    base_radius: f64,
    cos_coef: *const f64,
    cos_len: usize,
    sin_coef: *const f64,
    sin_len: usize,
    n_panels: usize,
    out: *mut *mut LdCurve,
) -> LdStatus {
    if out.is_null() || (cos_coef.is_null() && cos_len > 0) || (sin_coef.is_null() && sin_len > 0)
    {
        return LdStatus::InvalidArgument;
    }
    let cos_slice = if cos_len == 0 {
        &[][..]
    } else {
        unsafe { std::slice::from_raw_parts(cos_coef, cos_len) }
    };
    let sin_slice = if sin_len == 0 {
        &[][..]
    } else {
        unsafe { std::slice::from_raw_parts(sin_coef, sin_len) }
    };
    guard(|| {
        match build_fourier_curve([center_x, center_y], base_radius, cos_slice, sin_slice, n_panels)
        {
            Ok(curve) => {
                unsafe { *out = Box::into_raw(Box::new(LdCurve { inner: curve })) };
                LdStatus::Ok
            }
            Err(_) => LdStatus::GeometryError,
        }
    })
}

/// Release a curve handle. Null is a no-op.
///
/// # Safety
/// `curve` must be a pointer previously returned by a curve constructor, and
/// must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ld_curve_free(curve: *mut LdCurve) {
    if !curve.is_null() {
        drop(unsafe { Box::from_raw(curve) });
    }
}

/// Total arc length of the curve.
///
/// # Safety
/// `curve` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ld_curve_length(curve: *const LdCurve) -> f64 {
    if curve.is_null() {
        return f64::NAN;
    }
    unsafe { &*curve }.inner.total_length()
}

/// Landau level B(2q + 1).
#[no_mangle]
pub extern "C" fn ld_landau_level(q: usize, b: f64) -> f64 {
    landau::landau_level(q, b)
}

/// Green function of the Landau Hamiltonian at (x, y), spectral parameter
/// lambda = lambda_re + i lambda_im, field strength b.
///
/// # Safety
/// `out_re` and `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ld_green_function(
    x1: f64,
    x2: f64,
    y1: f64,
    y2: f64,
    lambda_re: f64,
    lambda_im: f64,
    b: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> LdStatus {
    if out_re.is_null() || out_im.is_null() || !(b > 0.0) {
        return LdStatus::InvalidArgument;
    }
    guard(|| {
        match landau::green_function([x1, x2], [y1, y2], Complex64::new(lambda_re, lambda_im), b)
        {
            Ok(g) => {
                unsafe {
                    *out_re = g.re;
                    *out_im = g.im;
                }
                LdStatus::Ok
            }
            Err(landau::LandauError::OnLandauLevel { .. }) => LdStatus::OnLandauLevel,
            Err(_) => LdStatus::NumericalError,
        }
    })
}

/// Logarithmic capacity of the full curve (s_b <= s_a) or of the sub-arc
/// [s_a, s_b] in arc length.
///
/// # Safety
/// `curve` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ld_capacity(
    curve: *const LdCurve,
    s_a: f64,
    s_b: f64,
    out: *mut f64,
) -> LdStatus {
    if curve.is_null() || out.is_null() {
        return LdStatus::InvalidArgument;
    }
    let curve = &unsafe { &*curve }.inner;
    guard(|| {
        let set = if s_b > s_a {
            match sub_arc(curve, s_a, s_b) {
                Ok(arc) => CapacitySet::from_arc(&arc),
                Err(_) => return LdStatus::GeometryError,
            }
        } else {
            CapacitySet::from_curve(curve)
        };
        match capacity_of(&set) {
            Ok(cap) => {
                unsafe { *out = cap };
                LdStatus::Ok
            }
            Err(_) => LdStatus::NumericalError,
        }
    })
}

/// Logarithmic capacity of the straight segment from (ax, ay) to (bx, by).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ld_capacity_segment(
    ax: f64,
    ay: f64,
    bx: f64,
    by: f64,
    n_panels: usize,
    out: *mut f64,
) -> LdStatus {
    if out.is_null() {
        return LdStatus::InvalidArgument;
    }
    guard(|| {
        let seg = match build_segment([ax, ay], [bx, by], n_panels) {
            Ok(seg) => seg,
            Err(_) => return LdStatus::GeometryError,
        };
        match capacity_of(&CapacitySet::from_arc(&seg)) {
            Ok(cap) => {
                unsafe { *out = cap };
                LdStatus::Ok
            }
            Err(_) => LdStatus::NumericalError,
        }
    })
}

/// Operator norm of the symmetrized Weyl matrix M(lambda) on the curve.
///
/// # Safety
/// `curve` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ld_weyl_norm(
    curve: *const LdCurve,
    lambda_re: f64,
    lambda_im: f64,
    b: f64,
    out: *mut f64,
) -> LdStatus {
    if curve.is_null() || out.is_null() || !(b > 0.0) {
        return LdStatus::InvalidArgument;
    }
    let curve = &unsafe { &*curve }.inner;
    guard(|| {
        match landelta::bie::assemble_weyl(curve, Complex64::new(lambda_re, lambda_im), b) {
            Ok(m) => {
                unsafe { *out = m.operator_norm() };
                LdStatus::Ok
            }
            Err(landelta::bie::BieError::OnLandauLevel) => LdStatus::OnLandauLevel,
            Err(_) => LdStatus::NumericalError,
        }
    })
}

/// Singular values of the level-q Toeplitz-type operator restricted to the
/// curve (s_b <= s_a) or the sub-arc [s_a, s_b]. Writes up to `capacity`
/// values into `out_svals`, stores the count in `out_len`.
///
/// # Safety
/// `curve` must be live; `out_svals` must have room for `capacity` doubles;
/// `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ld_toeplitz_singular_values(
    curve: *const LdCurve,
    q: usize,
    b: f64,
    m_max: i64,
    s_a: f64,
    s_b: f64,
    out_svals: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> LdStatus {
    if curve.is_null() || out_svals.is_null() || out_len.is_null() || !(b > 0.0) {
        return LdStatus::InvalidArgument;
    }
    let curve = &unsafe { &*curve }.inner;
    guard(|| {
        let m_cap = if m_max < 0 { None } else { Some(m_max) };
        let svals = if s_b > s_a {
            let arc = match sub_arc(curve, s_a, s_b) {
                Ok(a) => a,
                Err(_) => return LdStatus::GeometryError,
            };
            toeplitz::assemble_toeplitz(q, &toeplitz::Gamma::Arc(&arc), b, m_cap, true)
                .singular_values()
        } else {
            toeplitz::assemble_toeplitz(q, &toeplitz::Gamma::Curve(curve), b, m_cap, false)
                .singular_values()
        };
        if svals.len() > capacity {
            unsafe { *out_len = svals.len() };
            return LdStatus::BufferTooSmall;
        }
        unsafe {
            for (i, &s) in svals.iter().enumerate() {
                *out_svals.add(i) = s;
            }
            *out_len = svals.len();
        }
        LdStatus::Ok
    })
}

/// Perturbed eigenvalues near Lambda_q for a constant strength alpha on the
/// full curve (s_b <= s_a) or on the arc-length window [s_a, s_b]. Writes up
/// to `capacity` (lambda, gap) pairs, nearest-last in the distance ordering.
///
/// # Safety
/// `curve` must be live; `out_lambda` and `out_gap` must each have room for
/// `capacity` doubles; `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ld_cluster_eigenvalues(
    curve: *const LdCurve,
    alpha: f64,
    s_a: f64,
    s_b: f64,
    q: usize,
    side: LdSide,
    k_max: usize,
    b: f64,
    out_lambda: *mut f64,
    out_gap: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> LdStatus {
    if curve.is_null()
        || out_lambda.is_null()
        || out_gap.is_null()
        || out_len.is_null()
        || !(b > 0.0)
        || k_max == 0
    {
        return LdStatus::InvalidArgument;
    }
    let curve = &unsafe { &*curve }.inner;
    guard(|| {
        let strength = if s_b > s_a {
            let arc = match sub_arc(curve, s_a, s_b) {
                Ok(a) => a,
                Err(_) => return LdStatus::GeometryError,
            };
            StrengthFunction::on_arc(curve, &arc, move |_| alpha)
        } else {
            StrengthFunction::constant(curve, alpha)
        };
        let side = match side {
            LdSide::Above => Side::Above,
            LdSide::Below => Side::Below,
        };
        match spectral::find_cluster_eigenvalues(curve, &strength, q, side, k_max, b) {
            Ok(rep) => {
                let flattened: Vec<(f64, f64)> = rep
                    .eigenvalues
                    .iter()
                    .flat_map(|e| std::iter::repeat((e.lambda, e.gap)).take(e.multiplicity))
                    .collect();
                if flattened.len() > capacity {
                    unsafe { *out_len = flattened.len() };
                    return LdStatus::BufferTooSmall;
                }
                unsafe {
                    for (i, &(l, g)) in flattened.iter().enumerate() {
                        *out_lambda.add(i) = l;
                        *out_gap.add(i) = g;
                    }
                    *out_len = flattened.len();
                }
                LdStatus::Ok
            }
            Err(spectral::SpectralError::NoEigenvaluesFound { .. }) => {
                unsafe { *out_len = 0 };
                LdStatus::NoEigenvalues
            }
            Err(_) => LdStatus::NumericalError,
        }
    })
}
