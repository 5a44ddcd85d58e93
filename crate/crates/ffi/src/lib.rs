//! C ABI over the detl library.
//!
//! Every entry point returns a [`DetlStatus`]. On anything but
//! `DETL_STATUS_OK` the message is available from [`detl_last_error`] until
//! the next call on the same thread. Strings handed out by the library are
//! released with [`detl_string_free`]; workspaces with
//! [`detl_workspace_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use detl::io::ModelDoc;
use detl::logic::{bisimilar, reduce, validity, Validity, ValidityOptions};
use detl::semantics::{eval, eval_rdetl, eval_ydel, pair_name, product_update, ydel_update, Outcome};
use detl::{Error, Property, Workspace};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetlStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument is not UTF-8.
    InvalidUtf8 = 2,
    /// Parse, name, file or model error.
    Error = 3,
    /// The tableau node limit was exceeded.
    ResourceExceeded = 4,
    /// The library panicked; this is a bug.
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetlTruth {
    False = 0,
    True = 1,
    /// Restricted semantics only: the model or an action is out of scope.
    NotInScope = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetlMode {
    Detl = 0,
    Ydel = 1,
    Rdetl = 2,
}

/// Opaque handle to a loaded workspace.
pub struct DetlWorkspace {
    inner: Workspace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Status(DetlStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

type Res<T> = std::result::Result<T, Fail>;

fn guard(f: impl FnOnce() -> Res<()>) -> DetlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DetlStatus::Ok,
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Fail::Lib(e))) => {
            let s = match e {
                Error::ResourceExceeded(_) => DetlStatus::ResourceExceeded,
                _ => DetlStatus::Error,
            };
            set_error(e.to_string());
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            DetlStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Res<&'a str> {
    if p.is_null() {
        return Err(Fail::Status(DetlStatus::NullArgument, format!("`{what}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(DetlStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn workspace<'a>(ws: *const DetlWorkspace) -> Res<&'a Workspace> {
    ws.as_ref()
        .map(|w| &w.inner)
        .ok_or_else(|| Fail::Status(DetlStatus::NullArgument, "`ws` is null".into()))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Res<()> {
    if out.is_null() {
        return Err(Fail::Status(DetlStatus::NullArgument, format!("`{what}` is null")));
    }
    out.write(v);
    Ok(())
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

fn options(max_nodes: u64) -> ValidityOptions {
    if max_nodes == 0 {
        ValidityOptions::default()
    } else {
        ValidityOptions {
            max_nodes: usize::try_from(max_nodes).unwrap_or(usize::MAX),
        }
    }
}

/// Loads every `*.json` file of `dir`. Writes a new handle to `*out`.
///
/// # Safety
/// `dir` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn detl_workspace_load(dir: *const c_char, out: *mut *mut DetlWorkspace) -> DetlStatus {
    guard(|| {
        let dir = text(dir, "dir")?;
        if out.is_null() {
            return Err(Fail::Status(DetlStatus::NullArgument, "`out` is null".into()));
        }
        let inner = Workspace::load_dir(dir)?;
        put(out, Box::into_raw(Box::new(DetlWorkspace { inner })), "out")
    })
}

/// Loads a bundled fixture set, `"detl"` or `"ydel"`.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn detl_workspace_fixtures(name: *const c_char, out: *mut *mut DetlWorkspace) -> DetlStatus {
    guard(|| {
        let inner = match text(name, "name")? {
            "detl" => detl::fixtures::detl()?,
            "ydel" => detl::fixtures::ydel()?,
            other => return Err(Fail::Status(DetlStatus::Error, format!("no fixture set `{other}`"))),
        };
        put(out, Box::into_raw(Box::new(DetlWorkspace { inner })), "out")
    })
}

/// Releases a workspace. Null is ignored.
///
/// # Safety
/// `ws` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn detl_workspace_free(ws: *mut DetlWorkspace) {
    if !ws.is_null() {
        drop(Box::from_raw(ws));
    }
}

/// Evaluates `formula` at `world` of `model`. `max_nodes` bounds the
/// tableau used by restricted semantics; 0 means the default.
///
/// # Safety
/// String arguments must be nul-terminated; `ws` and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn detl_eval(
    ws: *const DetlWorkspace,
    model: *const c_char,
    world: *const c_char,
    formula: *const c_char,
    mode: DetlMode,
    max_nodes: u64,
    out: *mut DetlTruth,
) -> DetlStatus {
    guard(|| {
        let ws = workspace(ws)?;
        let m = ws.model(text(model, "model")?)?;
        let world = text(world, "world")?;
        let f = ws.parse(text(formula, "formula")?)?;
        let truth = match mode {
            DetlMode::Detl => Outcome::from_bool(eval(m, world, &f)?),
            DetlMode::Ydel => Outcome::from_bool(eval_ydel(m, world, &f, false)?),
            DetlMode::Rdetl => eval_rdetl(m, world, &f, &options(max_nodes))?,
        };
        let t = match truth {
            Outcome::True => DetlTruth::True,
            Outcome::False => DetlTruth::False,
            Outcome::NotInScope(why) => {
                set_error(why);
                DetlTruth::NotInScope
            }
        };
        put(out, t, "out")
    })
}

/// Updates `model` with `action` and writes the canonical JSON document of
/// the result to `*out`. `DETL_MODE_RDETL` is rejected.
///
/// # Safety
/// String arguments must be nul-terminated; `ws` and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn detl_update(
    ws: *const DetlWorkspace,
    model: *const c_char,
    action: *const c_char,
    mode: DetlMode,
    out: *mut *mut c_char,
) -> DetlStatus {
    guard(|| {
        let ws = workspace(ws)?;
        let (mname, aname) = (text(model, "model")?, text(action, "action")?);
        let (m, u) = (ws.model(mname)?, ws.action(aname)?);
        let mu = match mode {
            DetlMode::Detl => product_update(m, u)?,
            DetlMode::Ydel => ydel_update(m, u, false)?,
            DetlMode::Rdetl => return Err(Fail::Status(DetlStatus::Error, "update has no restricted mode".into())),
        };
        let point = match (ws.model_point(mname), ws.action_point(aname)) {
            (Some(w), Some(s)) => Some(pair_name(w, s)).filter(|p| mu.world_index(p).is_ok()),
            _ => None,
        };
        put(out, owned(ModelDoc::from_model(&mu, point.as_deref()).render()), "out")
    })
}

/// Checks one property of a model, or of an action given as `U` or `U@e`.
/// Writes whether it holds to `*holds` and, when `report` is not null, the
/// report line to `*report`.
///
/// # Safety
/// String arguments must be nul-terminated; `ws` and `holds` valid.
#[no_mangle]
pub unsafe extern "C" fn detl_check(
    ws: *const DetlWorkspace,
    target: *const c_char,
    property: *const c_char,
    holds: *mut bool,
    report: *mut *mut c_char,
) -> DetlStatus {
    guard(|| {
        let ws = workspace(ws)?;
        let target = text(target, "target")?;
        let prop: Property = text(property, "property")?.parse()?;
        let opts = ValidityOptions::default();
        let (name, point) = match target.split_once('@') {
            Some((n, e)) => (n, Some(e)),
            None => (target, None),
        };
        let r = if ws.is_model(name) && point.is_none() {
            ws.model(name)?.check_property(prop)?
        } else {
            let u = ws.action(name)?;
            let point = point.or(ws.action_point(name));
            if prop == Property::Lrdetl {
                u.is_lrdetl_action(&opts)?
            } else {
                u.check_property(prop, point, &opts)?
            }
        };
        put(holds, r.holds, "holds")?;
        if !report.is_null() {
            report.write(owned(r.to_string()));
        }
        Ok(())
    })
}

/// Writes an equivalent action-free formula to `*out`.
///
/// # Safety
/// `formula` must be nul-terminated; `ws` and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn detl_reduce(ws: *const DetlWorkspace, formula: *const c_char, out: *mut *mut c_char) -> DetlStatus {
    guard(|| {
        let ws = workspace(ws)?;
        let f = ws.parse(text(formula, "formula")?)?;
        put(out, owned(detl::formula::print(&reduce(&f))), "out")
    })
}

/// Decides validity over all models. On an invalid formula, and when
/// `countermodel` is not null, writes the countermodel document, pointed at
/// the refuting world, to `*countermodel`. `max_nodes` 0 means the default.
///
/// # Safety
/// `formula` must be nul-terminated; `ws` and `valid` valid.
#[no_mangle]
pub unsafe extern "C" fn detl_validity(
    ws: *const DetlWorkspace,
    formula: *const c_char,
    max_nodes: u64,
    valid: *mut bool,
    countermodel: *mut *mut c_char,
) -> DetlStatus {
    guard(|| {
        let ws = workspace(ws)?;
        let f = ws.parse(text(formula, "formula")?)?;
        match validity(&f, ws.signature()?, &options(max_nodes))? {
            Validity::Valid => put(valid, true, "valid"),
            Validity::Invalid { model, world } => {
                put(valid, false, "valid")?;
                if !countermodel.is_null() {
                    countermodel.write(owned(ModelDoc::from_model(&model, Some(&world)).render()));
                }
                Ok(())
            }
        }
    })
}

/// Whether `(model, world)` and `(other, other_world)` are bisimilar.
///
/// # Safety
/// String arguments must be nul-terminated; `ws` and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn detl_bisimilar(
    ws: *const DetlWorkspace,
    model: *const c_char,
    world: *const c_char,
    other: *const c_char,
    other_world: *const c_char,
    out: *mut bool,
) -> DetlStatus {
    guard(|| {
        let ws = workspace(ws)?;
        let m = ws.model(text(model, "model")?)?;
        let n = ws.model(text(other, "other")?)?;
        let z = bisimilar(m, text(world, "world")?, n, text(other_world, "other_world")?)?;
        put(out, z.is_some(), "out")
    })
}

/// The message of the last failed call on this thread, or null. Owned by
/// the library; valid until the next call.
#[no_mangle]
pub extern "C" fn detl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn detl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
