//! C interface to the trefftz-fem library.
//!
//! Models and solutions are opaque handles created and released through this
//! interface. Every fallible call returns a [`TfStatus`]; the message of the
//! most recent failure on the calling thread is available from
//! [`tf_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use trefftz_fem::bench::{run_benchmark, BenchOptions};
use trefftz_fem::model::{prepare, Dof, DofMap, Model, Storage};
use trefftz_fem::plate_elements::PlateVariant;
use trefftz_fem::solver::{solve_eigen, solve_static};
use trefftz_fem::FemError;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    InvalidModel = 4,
    ParseError = 5,
    IoError = 6,
    DegenerateGeometry = 7,
    SingularElement = 8,
    SingularSystem = 9,
    NumericalFailure = 10,
    /// A benchmark ran but missed at least one tolerance.
    ToleranceFailure = 11,
    Panic = 12,
}

/// Plate element formulation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfPlateVariant {
    Zdeq = 0,
    Tfeq = 1,
    Jfeq = 2,
}

/// Nodal degree of freedom.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfDof {
    Ux = 0,
    Uy = 1,
    Uz = 2,
    Rx = 3,
    Ry = 4,
    Rz = 5,
}

/// Opaque model handle.
pub struct TfModel {
    model: Model,
}

/// Opaque static solution handle.
pub struct TfSolution {
    map: DofMap,
    node_index: std::collections::HashMap<u64, usize>,
    u: Vec<f64>,
    residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &FemError) -> TfStatus {
    match err {
        FemError::InvalidArgument(_) => TfStatus::InvalidArgument,
        FemError::InvalidModel(_) | FemError::InvalidFrame(_) => TfStatus::InvalidModel,
        FemError::Parse(_) => TfStatus::ParseError,
        FemError::Io(_) => TfStatus::IoError,
        FemError::DegenerateGeometry(_) => TfStatus::DegenerateGeometry,
        FemError::SingularElement { .. } => TfStatus::SingularElement,
        FemError::SingularSystem { .. } => TfStatus::SingularSystem,
        FemError::DegenerateLoadInterpolation(_) | FemError::InterpolationFailure { .. } | FemError::MassMatrix { .. } => {
            TfStatus::NumericalFailure
        }
    }
}

enum Failure {
    Status(TfStatus, String),
    Fem(FemError),
}

impl From<FemError> for Failure {
    fn from(e: FemError) -> Self {
        Failure::Fem(e)
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TfStatus::Ok
        }
        Ok(Err(Failure::Fem(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            TfStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(TfStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Status(TfStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn variant(v: TfPlateVariant) -> PlateVariant {
    match v {
        TfPlateVariant::Zdeq => PlateVariant::Zdeq,
        TfPlateVariant::Tfeq => PlateVariant::Tfeq,
        TfPlateVariant::Jfeq => PlateVariant::Jfeq,
    }
}

fn dof(d: TfDof) -> Dof {
    match d {
        TfDof::Ux => Dof::Ux,
        TfDof::Uy => Dof::Uy,
        TfDof::Uz => Dof::Uz,
        TfDof::Rx => Dof::Rx,
        TfDof::Ry => Dof::Ry,
        TfDof::Rz => Dof::Rz,
    }
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn tf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a model document.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_model_from_json(json: *const c_char, out: *mut *mut TfModel) -> TfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let model = Model::from_json(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(TfModel { model }));
        Ok(())
    })
}

/// Reads a model document from a file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_model_read(path: *const c_char, out: *mut *mut TfModel) -> TfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let model = Model::read(std::path::Path::new(str_arg(path, "path")?))?;
        *out = Box::into_raw(Box::new(TfModel { model }));
        Ok(())
    })
}

/// Releases a model; null is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tf_model_free(model: *mut TfModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of nodes and elements of a model.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tf_model_size(model: *const TfModel, nodes: *mut usize, elements: *mut usize) -> TfStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        if nodes.is_null() || elements.is_null() {
            return Err(null("output"));
        }
        *nodes = m.model.nodes.len();
        *elements = m.model.elements.len();
        Ok(())
    })
}

/// Switches every plate element of the model to `variant`.
///
/// # Safety
/// `model` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn tf_model_set_plate_variant(model: *mut TfModel, variant_: TfPlateVariant) -> TfStatus {
    guard(|| {
        let m = model.as_mut().ok_or_else(|| null("model"))?;
        m.model.set_plate_variant(variant(variant_));
        Ok(())
    })
}

/// Solves the static problem.
///
/// # Safety
/// `model` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_solve_static(model: *const TfModel, out: *mut *mut TfSolution) -> TfStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let (map, _, system) = prepare(&m.model, Storage::Auto)?;
        let sol = solve_static(&system)?;
        *out = Box::into_raw(Box::new(TfSolution {
            map,
            node_index: m.model.node_index(),
            u: sol.u.iter().copied().collect(),
            residual: sol.residual,
        }));
        Ok(())
    })
}

/// Releases a solution; null is ignored.
///
/// # Safety
/// `solution` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tf_solution_free(solution: *mut TfSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Length of the full DOF vector.
///
/// # Safety
/// `solution` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn tf_solution_len(solution: *const TfSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.u.len())
}

/// Relative residual of the static solve.
///
/// # Safety
/// `solution` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn tf_solution_residual(solution: *const TfSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.residual)
}

/// Copies the full DOF vector into `buffer`, which holds `len` values.
///
/// # Safety
/// `buffer` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn tf_solution_copy(solution: *const TfSolution, buffer: *mut f64, len: usize) -> TfStatus {
    guard(|| {
        let s = solution.as_ref().ok_or_else(|| null("solution"))?;
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        if len < s.u.len() {
            return Err(Failure::Status(
                TfStatus::InvalidArgument,
                format!("buffer holds {len} values, {} needed", s.u.len()),
            ));
        }
        ptr::copy_nonoverlapping(s.u.as_ptr(), buffer, s.u.len());
        Ok(())
    })
}

/// Displacement of one node DOF; the node is addressed by its model id.
///
/// # Safety
/// `solution` must be a valid handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_solution_displacement(
    solution: *const TfSolution,
    node_id: u64,
    dof_: TfDof,
    value: *mut f64,
) -> TfStatus {
    guard(|| {
        let s = solution.as_ref().ok_or_else(|| null("solution"))?;
        if value.is_null() {
            return Err(null("value"));
        }
        let node = *s
            .node_index
            .get(&node_id)
            .ok_or_else(|| Failure::Status(TfStatus::InvalidArgument, format!("unknown node {node_id}")))?;
        let i = s.map.index(node, dof(dof_)).ok_or_else(|| {
            Failure::Status(
                TfStatus::InvalidArgument,
                format!("node {node_id} carries no {} DOF", dof(dof_).name()),
            )
        })?;
        *value = s.u[i];
        Ok(())
    })
}

/// Lowest `count` angular frequencies, written to `omegas`.
///
/// # Safety
/// `model` must be a valid handle and `omegas` valid for `count` writes.
#[no_mangle]
pub unsafe extern "C" fn tf_solve_eigen(model: *const TfModel, count: usize, omegas: *mut f64) -> TfStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        if omegas.is_null() {
            return Err(null("omegas"));
        }
        let (_, _, system) = prepare(&m.model, Storage::Dense)?;
        let eig = solve_eigen(&system, count)?;
        let om = eig.omegas();
        ptr::copy_nonoverlapping(om.as_ptr(), omegas, om.len().min(count));
        Ok(())
    })
}

/// Runs a benchmark case and returns its JSON report in `report_json`, to be
/// released with [`tf_string_free`]. `variant` below zero selects the case
/// default, `mesh` and `quadrature` of zero keep the case defaults. Returns
/// `ToleranceFailure` when the run completes but misses a tolerance; the report
/// is produced in that case as well.
///
/// # Safety
/// `case_id` must be a nul-terminated string and `report_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_bench_run(
    case_id: *const c_char,
    variant_: i32,
    mesh: usize,
    quadrature: usize,
    report_json: *mut *mut c_char,
) -> TfStatus {
    guard(|| {
        if report_json.is_null() {
            return Err(null("report_json"));
        }
        let v = match variant_ {
            v if v < 0 => None,
            0 => Some(PlateVariant::Zdeq),
            1 => Some(PlateVariant::Tfeq),
            2 => Some(PlateVariant::Jfeq),
            other => {
                return Err(Failure::Status(TfStatus::InvalidArgument, format!("unknown variant {other}")));
            }
        };
        let opts = BenchOptions {
            variant: v,
            mesh: (mesh > 0).then_some(mesh),
            quadrature: (quadrature > 0).then_some(quadrature),
        };
        let report = run_benchmark(str_arg(case_id, "case_id")?, &opts)?;
        let json = CString::new(report.to_json()).expect("JSON has no nul bytes");
        *report_json = json.into_raw();
        if report.pass {
            Ok(())
        } else {
            Err(Failure::Status(
                TfStatus::ToleranceFailure,
                format!("{} of {} gated values out of tolerance", report.failures, report.gated),
            ))
        }
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
