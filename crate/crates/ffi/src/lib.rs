//! C interface to `formt`.
//!
//! Projects are opaque handles created by [`formt_project_new`] and released
//! with [`formt_project_free`]. Every fallible call returns a [`FormtStatus`];
//! on failure [`formt_last_error`] describes the most recent error on the
//! calling thread. Strings returned through `out` pointers are owned by the
//! caller and must be released with [`formt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use formt::form::FormError;
use formt::testbase::{parse_test_case, parse_tests};
use formt::{Error, GroupingMode, NodePath, Project, Settings};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormtStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    SchemaError = 4,
    VarCapExceeded = 5,
    UnknownNode = 6,
    NoReport = 7,
    Internal = 8,
    Panic = 9,
}

/// Opaque project handle.
pub struct FormtProject {
    inner: Project,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(FormtStatus, String);

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let status = match &err {
            Error::Logic(_) => FormtStatus::ParseError,
            Error::Form(FormError::InvalidPath(_)) => FormtStatus::UnknownNode,
            Error::Form(FormError::TooManyVariables { .. }) => FormtStatus::VarCapExceeded,
            Error::Form(_) => FormtStatus::ParseError,
            Error::Test(_) | Error::Json(_) => FormtStatus::SchemaError,
            Error::Layout(_) | Error::Io(_) | Error::Invariant(_) => FormtStatus::Internal,
        };
        Failure(status, err.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(err: serde_json::Error) -> Self {
        Failure(FormtStatus::SchemaError, err.to_string())
    }
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> FormtStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            FormtStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("panic inside formt".into());
            FormtStatus::Panic
        }
    }
}

unsafe fn text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(Failure(
            FormtStatus::NullArgument,
            format!("{what} is null"),
        ));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Failure(FormtStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn project<'a>(handle: *const FormtProject) -> Result<&'a FormtProject, Failure> {
    handle
        .as_ref()
        .ok_or_else(|| Failure(FormtStatus::NullArgument, "project handle is null".into()))
}

unsafe fn project_mut<'a>(handle: *mut FormtProject) -> Result<&'a mut FormtProject, Failure> {
    handle
        .as_mut()
        .ok_or_else(|| Failure(FormtStatus::NullArgument, "project handle is null".into()))
}

unsafe fn emit(out: *mut *mut c_char, value: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(
            FormtStatus::NullArgument,
            "output pointer is null".into(),
        ));
    }
    let value = CString::new(value)
        .map_err(|_| Failure(FormtStatus::Internal, "output contains a nul byte".into()))?;
    *out = value.into_raw();
    Ok(())
}

unsafe fn grouping(name: *const c_char) -> Result<GroupingMode, Failure> {
    if name.is_null() {
        return Ok(GroupingMode::Document);
    }
    text(name, "grouping")?
        .parse()
        .map_err(|m: String| Failure(FormtStatus::SchemaError, m))
}

/// Parses `spec` and builds a project. `settings_json` may be null for
/// defaults. On success `*out` receives a handle.
///
/// # Safety
/// `spec` and a non-null `settings_json` must be nul-terminated strings;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn formt_project_new(
    spec: *const c_char,
    settings_json: *const c_char,
    out: *mut *mut FormtProject,
) -> FormtStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(
                FormtStatus::NullArgument,
                "output pointer is null".into(),
            ));
        }
        let spec = text(spec, "spec")?;
        let settings: Settings = if settings_json.is_null() {
            Settings::default()
        } else {
            serde_json::from_str(text(settings_json, "settings")?)?
        };
        let inner = Project::new(spec, settings)?;
        *out = Box::into_raw(Box::new(FormtProject { inner }));
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`formt_project_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn formt_project_free(handle: *mut FormtProject) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn formt_project_translated(
    handle: *const FormtProject,
    out: *mut *mut c_char,
) -> FormtStatus {
    guard(|| emit(out, project(handle)?.inner.translated().to_string()))
}

/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn formt_project_simplified(
    handle: *const FormtProject,
    out: *mut *mut c_char,
) -> FormtStatus {
    guard(|| emit(out, project(handle)?.inner.simplified().to_string()))
}

/// Mutant list as a JSON array.
///
/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn formt_project_mutants_json(
    handle: *const FormtProject,
    out: *mut *mut c_char,
) -> FormtStatus {
    guard(|| {
        emit(
            out,
            serde_json::to_string(project(handle)?.inner.mutants())?,
        )
    })
}

/// Replaces the test base with `{"tests": [...]}`.
///
/// # Safety
/// `handle` must be live; `tests_json` must be a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn formt_project_set_tests_json(
    handle: *mut FormtProject,
    tests_json: *const c_char,
) -> FormtStatus {
    guard(|| {
        let project = project_mut(handle)?;
        let tests = parse_tests(
            text(tests_json, "tests")?,
            project.inner.settings().atom_syntax,
        )
        .map_err(Error::from)?;
        project.inner.set_tests(tests)?;
        Ok(())
    })
}

/// Appends one test case object.
///
/// # Safety
/// `handle` must be live; `test_json` must be a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn formt_project_add_test_json(
    handle: *mut FormtProject,
    test_json: *const c_char,
) -> FormtStatus {
    guard(|| {
        let project = project_mut(handle)?;
        let value: serde_json::Value = serde_json::from_str(text(test_json, "test")?)?;
        let id = project.inner.next_test_id();
        let test = parse_test_case(&value, "$", &id, project.inner.settings().atom_syntax)
            .map_err(Error::from)?;
        project.inner.add_test(test)?;
        Ok(())
    })
}

/// Runs the kill analysis. When `out` is non-null it receives the report JSON.
///
/// # Safety
/// `handle` must be live; a non-null `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn formt_project_evaluate(
    handle: *mut FormtProject,
    out: *mut *mut c_char,
) -> FormtStatus {
    guard(|| {
        let report = project_mut(handle)?.inner.evaluate();
        if out.is_null() {
            return Ok(());
        }
        let json = serde_json::to_string(report)?;
        emit(out, json)
    })
}

/// Latest report as JSON, or [`FormtStatus::NoReport`].
///
/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn formt_project_report_json(
    handle: *const FormtProject,
    out: *mut *mut c_char,
) -> FormtStatus {
    guard(|| match project(handle)?.inner.report() {
        Some(report) => emit(out, serde_json::to_string(report)?),
        None => Err(Failure(
            FormtStatus::NoReport,
            "no report; evaluate first".into(),
        )),
    })
}

/// Scene graph as JSON. A null `grouping_name` selects document order.
///
/// # Safety
/// `handle` must be live; a non-null `grouping_name` must be a nul-terminated
/// string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn formt_project_scene_json(
    handle: *const FormtProject,
    grouping_name: *const c_char,
    out: *mut *mut c_char,
) -> FormtStatus {
    guard(|| {
        let scene = project(handle)?.inner.scene(grouping(grouping_name)?)?;
        emit(out, serde_json::to_string(&scene)?)
    })
}

/// Rendered SVG map. A null `grouping_name` selects document order.
///
/// # Safety
/// As for [`formt_project_scene_json`].
#[no_mangle]
pub unsafe extern "C" fn formt_project_scene_svg(
    handle: *const FormtProject,
    grouping_name: *const c_char,
    out: *mut *mut c_char,
) -> FormtStatus {
    guard(|| {
        let project = &project(handle)?.inner;
        let scene = project.scene(grouping(grouping_name)?)?;
        emit(
            out,
            formt::render_svg(&scene, &project.settings().layout.palette),
        )
    })
}

/// Conventional-logic reading of the node at `path` ("root" or "0.1").
///
/// # Safety
/// `handle` must be live; `path` must be a nul-terminated string; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn formt_project_node_logic(
    handle: *const FormtProject,
    path: *const c_char,
    out: *mut *mut c_char,
) -> FormtStatus {
    guard(|| {
        let path: NodePath = text(path, "path")?.parse().map_err(Error::from)?;
        emit(out, project(handle)?.inner.node_logic(&path)?)
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn formt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn formt_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
