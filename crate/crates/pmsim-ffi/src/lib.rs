//! C ABI for the pmsim contextuality simulator.
//!
//! Opaque handles own their Rust values; every function returns a
//! [`PmsimStatus`] and writes results through out-pointers. The header is
//! generated into `include/pmsim.h` by the build script.
//!
//! # Safety
//!
//! Callers must pass pointers that are either null (reported as
//! `NullPointer`) or valid for the documented length, and must free
//! handles with the matching `_free` function exactly once.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use pmsim::dqc1::{run_experiment_suite_with, ProbeSpec};
use pmsim::linalg::DensityMatrix;
use pmsim::noise::{dephasing_eta, noisy_suite_beta, NoiseModel};
use pmsim::square::{beta_quantum_for, nchv_max, pm_square, verify_square, PmSquare};

/// Result of every FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    NumericalError = 4,
    InternalPanic = 5,
}

fn status_of(err: &pmsim::Error) -> PmsimStatus {
    match err {
        pmsim::Error::PauliParse { .. } | pmsim::Error::TextParse { .. } => PmsimStatus::ParseError,
        pmsim::Error::NumericalIntegrity(_) => PmsimStatus::NumericalError,
        _ => PmsimStatus::InvalidArgument,
    }
}

/// A static description of a status code.
#[no_mangle]
pub extern "C" fn pmsim_status_message(status: PmsimStatus) -> *const c_char {
    let text: &'static [u8] = match status {
        PmsimStatus::Ok => b"ok\0",
        PmsimStatus::NullPointer => b"null pointer argument\0",
        PmsimStatus::InvalidArgument => b"invalid argument\0",
        PmsimStatus::ParseError => b"parse error\0",
        PmsimStatus::NumericalError => b"numerical integrity error\0",
        PmsimStatus::InternalPanic => b"internal panic\0",
    };
    text.as_ptr().cast()
}

/// Opaque handle to a 3x3 observable square.
pub struct PmsimSquare {
    inner: PmSquare,
}

/// The canonical square; never fails. Free with [`pmsim_square_free`].
#[no_mangle]
pub extern "C" fn pmsim_square_standard() -> *mut PmsimSquare {
    Box::into_raw(Box::new(PmsimSquare { inner: pm_square() }))
}

/// Parses a square from its text form (three token rows plus a sign row)
/// and stores a new handle in `out`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn pmsim_square_parse(
    text: *const c_char,
    out: *mut *mut PmsimSquare,
) -> PmsimStatus {
    if text.is_null() || out.is_null() {
        return PmsimStatus::NullPointer;
    }
    let Ok(text) = CStr::from_ptr(text).to_str() else {
        return PmsimStatus::ParseError;
    };
    match PmSquare::parse(text) {
        Ok(square) => {
            *out = Box::into_raw(Box::new(PmsimSquare { inner: square }));
            PmsimStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// Releases a square handle. Null is ignored.
///
/// # Safety
/// `square` must have come from this library and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn pmsim_square_free(square: *mut PmsimSquare) {
    if !square.is_null() {
        drop(Box::from_raw(square));
    }
}

/// Writes true when every line of the square commutes pairwise and its
/// product equals the line sign times the identity.
///
/// # Safety
/// Pointers must be valid as documented on the module.
#[no_mangle]
pub unsafe extern "C" fn pmsim_square_verify(
    square: *const PmsimSquare,
    out_pass: *mut bool,
) -> PmsimStatus {
    if square.is_null() || out_pass.is_null() {
        return PmsimStatus::NullPointer;
    }
    *out_pass = verify_square(&(*square).inner).passed();
    PmsimStatus::Ok
}

/// Brute-forces the noncontextual maximum of beta over all 512 outcome
/// assignments. `out_assignment` receives nine row-major values of +-1.
///
/// # Safety
/// `out_assignment` must be valid for writes of 9 elements.
#[no_mangle]
pub unsafe extern "C" fn pmsim_square_nchv_max(
    square: *const PmsimSquare,
    out_max: *mut f64,
    out_assignment: *mut i8,
) -> PmsimStatus {
    if square.is_null() || out_max.is_null() || out_assignment.is_null() {
        return PmsimStatus::NullPointer;
    }
    let (max, assignment) = nchv_max(&(*square).inner);
    *out_max = max;
    for (slot, &value) in assignment.values().iter().enumerate() {
        *out_assignment.add(slot) = value;
    }
    PmsimStatus::Ok
}

/// The quantum value of beta for the square, evaluated on the maximally
/// mixed two-qubit state (the value is state independent for a valid
/// square).
///
/// # Safety
/// Pointers must be valid as documented on the module.
#[no_mangle]
pub unsafe extern "C" fn pmsim_square_beta_quantum(
    square: *const PmsimSquare,
    out_beta: *mut f64,
) -> PmsimStatus {
    if square.is_null() || out_beta.is_null() {
        return PmsimStatus::NullPointer;
    }
    let dim = 1usize << (*square).inner.entry(0, 0).len();
    match beta_quantum_for(&(*square).inner, &DensityMatrix::maximally_mixed(dim)) {
        Ok(beta) => {
            *out_beta = beta;
            PmsimStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// eta = 1 - exp(-t/T2) for times in ms.
///
/// # Safety
/// `out_eta` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pmsim_dephasing_eta(
    t_ms: f64,
    t2_ms: f64,
    out_eta: *mut f64,
) -> PmsimStatus {
    if out_eta.is_null() {
        return PmsimStatus::NullPointer;
    }
    match dephasing_eta(t_ms, t2_ms) {
        Ok(eta) => {
            *out_eta = eta;
            PmsimStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// Runs the six-experiment probe suite on the maximally mixed system.
/// `out_terms` receives the six corrected line correlations in the order
/// r1, r2, r3, c1, c2, c3; `out_beta` the signed sum. With
/// `epsilon_corrected` false the raw correlations are reported instead.
///
/// # Safety
/// `out_terms` must be valid for writes of 6 elements; `out_beta` for one.
#[no_mangle]
pub unsafe extern "C" fn pmsim_suite_beta(
    epsilon: f64,
    epsilon_corrected: bool,
    out_terms: *mut f64,
    out_beta: *mut f64,
) -> PmsimStatus {
    if out_terms.is_null() || out_beta.is_null() {
        return PmsimStatus::NullPointer;
    }
    let run = || -> pmsim::Result<(Vec<f64>, f64)> {
        let probe = ProbeSpec::new(epsilon)?;
        let suite = run_experiment_suite_with(probe, None, epsilon_corrected)?;
        Ok((
            suite
                .lines
                .iter()
                .map(|l| l.corrected_correlation)
                .collect(),
            suite.beta,
        ))
    };
    match catch_unwind(AssertUnwindSafe(run)) {
        Ok(Ok((terms, beta))) => {
            for (slot, term) in terms.iter().enumerate() {
                *out_terms.add(slot) = *term;
            }
            *out_beta = beta;
            PmsimStatus::Ok
        }
        Ok(Err(err)) => status_of(&err),
        Err(_) => PmsimStatus::InternalPanic,
    }
}

/// Epsilon-corrected beta of the suite with per-gate three-qubit
/// dephasing: pulse length `t_ms`, dephasing time `t2_ms`, and `gates`
/// channel applications per line.
///
/// # Safety
/// `out_beta` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pmsim_noisy_suite_beta(
    epsilon: f64,
    t_ms: f64,
    t2_ms: f64,
    gates: u32,
    out_beta: *mut f64,
) -> PmsimStatus {
    if out_beta.is_null() {
        return PmsimStatus::NullPointer;
    }
    let run = || -> pmsim::Result<f64> {
        let probe = ProbeSpec::new(epsilon)?;
        let model = NoiseModel::new(t_ms, t2_ms, gates as usize)?;
        noisy_suite_beta(&model, probe)
    };
    match catch_unwind(AssertUnwindSafe(run)) {
        Ok(Ok(beta)) => {
            *out_beta = beta;
            PmsimStatus::Ok
        }
        Ok(Err(err)) => status_of(&err),
        Err(_) => PmsimStatus::InternalPanic,
    }
}
