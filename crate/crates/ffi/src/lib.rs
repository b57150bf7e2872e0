//! C ABI for the cablekin toolkit.
//!
//! Exposes model loading, prediction, and the exact kinematics behind an
//! opaque handle plus status codes, so firmware tooling, Python (ctypes /
//! cffi) or any other C-capable language can drive the same model blobs the
//! CLI produces. The header is generated into `include/cablekin.h` at build
//! time.
//!
//! Conventions:
//! - Every fallible call returns [`CkStatus`]; `CK_STATUS_OK` is 0.
//! - Out-parameters are written only on success.
//! - `cablekin_model_*` handles come from the load functions and must be
//!   released exactly once with [`cablekin_model_free`].
//! - Feature vectors are `x, y, z, B, D, H, R` (7 doubles); rotation vectors
//!   are `theta0..theta3` (4 doubles).
#![allow(clippy::missing_safety_doc)]

use std::ffi::{c_char, c_int, CStr};
use std::path::Path;

use cablekin::kinematics::KinematicsError;
use cablekin::quant::{self, AnyModel, ModelBlob, QuantError};
use cablekin::{Point3, Rig, StringLengths};

/// Number of input features per prediction.
pub const CABLEKIN_NUM_FEATURES: usize = 7;
/// Number of predicted motor rotations.
pub const CABLEKIN_NUM_OUTPUTS: usize = 4;

/// Result of a C-ABI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument violated its documented domain.
    InvalidArgument = 2,
    /// The bytes are not a valid model container.
    ParseError = 3,
    IoError = 4,
    /// The target position lies outside the rig workspace.
    WorkspaceViolation = 5,
    /// A numeric failure such as inconsistent cable lengths.
    NumericError = 6,
}

fn status_of_kinematics(e: &KinematicsError) -> CkStatus {
    match e {
        KinematicsError::OutOfWorkspace { .. } => CkStatus::WorkspaceViolation,
        KinematicsError::InfeasibleRotation { .. }
        | KinematicsError::InconsistentLengths(_)
        | KinematicsError::SingularGeometry(_) => CkStatus::NumericError,
        _ => CkStatus::InvalidArgument,
    }
}

fn status_of_quant(e: &QuantError) -> CkStatus {
    match e {
        QuantError::Io(_) => CkStatus::IoError,
        QuantError::InvalidSymbol(_) => CkStatus::InvalidArgument,
        _ => CkStatus::ParseError,
    }
}

/// An opaque loaded model (float or quantized).
pub struct CkModel {
    inner: AnyModel,
}

unsafe fn model_out(out: *mut *mut CkModel, model: AnyModel) -> CkStatus {
    *out = Box::into_raw(Box::new(CkModel { inner: model }));
    CkStatus::Ok
}

/// Parses a model container from a byte buffer.
#[no_mangle]
pub unsafe extern "C" fn cablekin_model_from_bytes(
    data: *const u8,
    len: usize,
    out_model: *mut *mut CkModel,
) -> CkStatus {
    if data.is_null() || out_model.is_null() {
        return CkStatus::NullArgument;
    }
    let bytes = std::slice::from_raw_parts(data, len).to_vec();
    match quant::deserialize(&ModelBlob::from_bytes(bytes)) {
        Ok(model) => model_out(out_model, model),
        Err(e) => status_of_quant(&e),
    }
}

/// Reads and parses a model container file (path is UTF-8).
#[no_mangle]
pub unsafe extern "C" fn cablekin_model_load(
    path: *const c_char,
    out_model: *mut *mut CkModel,
) -> CkStatus {
    if path.is_null() || out_model.is_null() {
        return CkStatus::NullArgument;
    }
    let Ok(path) = CStr::from_ptr(path).to_str() else {
        return CkStatus::InvalidArgument;
    };
    let blob = match ModelBlob::read_file(Path::new(path)) {
        Ok(blob) => blob,
        Err(e) => return status_of_quant(&e),
    };
    match quant::deserialize(&blob) {
        Ok(model) => model_out(out_model, model),
        Err(e) => status_of_quant(&e),
    }
}

/// Releases a model handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn cablekin_model_free(model: *mut CkModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Returns 1 when the model stores 8-bit weights, 0 for float weights and
/// -1 when the handle is null.
#[no_mangle]
pub unsafe extern "C" fn cablekin_model_is_quantized(model: *const CkModel) -> c_int {
    match model.as_ref() {
        Some(m) => m.inner.is_quantized() as c_int,
        None => -1,
    }
}

/// Predicts the four motor rotations for one feature vector.
/// `features` must hold 7 doubles, `rotations_out` room for 4.
#[no_mangle]
pub unsafe extern "C" fn cablekin_model_predict(
    model: *const CkModel,
    features: *const f64,
    rotations_out: *mut f64,
) -> CkStatus {
    let Some(model) = model.as_ref() else {
        return CkStatus::NullArgument;
    };
    if features.is_null() || rotations_out.is_null() {
        return CkStatus::NullArgument;
    }
    let features: &[f64; CABLEKIN_NUM_FEATURES] =
        &*(features as *const [f64; CABLEKIN_NUM_FEATURES]);
    if features.iter().any(|v| !v.is_finite()) {
        return CkStatus::InvalidArgument;
    }
    let rotations = model.inner.predict(features);
    std::ptr::copy_nonoverlapping(rotations.as_ptr(), rotations_out, CABLEKIN_NUM_OUTPUTS);
    CkStatus::Ok
}

/// Exact rotations from the closed-form kinematics: moving a point robot
/// from the rig's base pose `(B/2, D/2, H)` to `(x, y, z)` on a rig with
/// dimensions `B x D x H` and uniform winch radius `R`.
#[no_mangle]
pub unsafe extern "C" fn cablekin_exact_rotations(
    breadth: f64,
    depth: f64,
    height: f64,
    radius: f64,
    x: f64,
    y: f64,
    z: f64,
    rotations_out: *mut f64,
) -> CkStatus {
    if rotations_out.is_null() {
        return CkStatus::NullArgument;
    }
    let rig = match Rig::with_uniform_radius(breadth, depth, height, radius) {
        Ok(rig) => rig,
        Err(e) => return status_of_kinematics(&e),
    };
    match rig.target_to_rotations(Point3::new(x, y, z)) {
        Ok(rot) => {
            let values = rot.values();
            std::ptr::copy_nonoverlapping(values.as_ptr(), rotations_out, CABLEKIN_NUM_OUTPUTS);
            CkStatus::Ok
        }
        Err(e) => status_of_kinematics(&e),
    }
}

/// Recovers the point-robot position from four cable lengths. `lengths`
/// must hold 4 doubles; the position is written as `x, y, z` into
/// `position_out` (3 doubles). `tol` is the relative residual tolerance on
/// squared lengths (pass 0 for the default 1e-6).
#[no_mangle]
pub unsafe extern "C" fn cablekin_forward_position(
    breadth: f64,
    depth: f64,
    height: f64,
    lengths: *const f64,
    tol: f64,
    position_out: *mut f64,
) -> CkStatus {
    if lengths.is_null() || position_out.is_null() {
        return CkStatus::NullArgument;
    }
    // The winch radius does not enter forward kinematics.
    let rig = match Rig::with_uniform_radius(breadth, depth, height, 1.0) {
        Ok(rig) => rig,
        Err(e) => return status_of_kinematics(&e),
    };
    let lengths = *(lengths as *const [f64; 4]);
    let lengths = match StringLengths::new(lengths) {
        Ok(l) => l,
        Err(e) => return status_of_kinematics(&e),
    };
    let tol = if tol > 0.0 {
        tol
    } else {
        cablekin::kinematics::DEFAULT_FK_TOL
    };
    match rig.forward_position(lengths, tol) {
        Ok(p) => {
            let out = [p.x, p.y, p.z];
            std::ptr::copy_nonoverlapping(out.as_ptr(), position_out, 3);
            CkStatus::Ok
        }
        Err(e) => status_of_kinematics(&e),
    }
}

/// A static, null-terminated description of a status code.
#[no_mangle]
pub extern "C" fn cablekin_status_message(status: CkStatus) -> *const c_char {
    let msg: &'static CStr = match status {
        CkStatus::Ok => c"ok",
        CkStatus::NullArgument => c"a required pointer argument was null",
        CkStatus::InvalidArgument => c"an argument violated its documented domain",
        CkStatus::ParseError => c"the bytes are not a valid model container",
        CkStatus::IoError => c"the file could not be read or written",
        CkStatus::WorkspaceViolation => c"the target position lies outside the rig workspace",
        CkStatus::NumericError => c"numeric failure (inconsistent lengths or singular geometry)",
    };
    msg.as_ptr()
}
