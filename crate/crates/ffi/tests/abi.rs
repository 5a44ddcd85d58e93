use std::ffi::{c_char, CStr, CString};
use std::ptr;

use detl_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = detl_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    detl_string_free(s);
    out
}

struct Ws(*mut DetlWorkspace);

impl Drop for Ws {
    fn drop(&mut self) {
        unsafe { detl_workspace_free(self.0) }
    }
}

fn fixtures(name: &str) -> Ws {
    let mut ws = ptr::null_mut();
    let st = unsafe { detl_workspace_fixtures(c(name).as_ptr(), &mut ws) };
    assert_eq!(st, DetlStatus::Ok);
    Ws(ws)
}

fn eval(ws: &Ws, model: &str, world: &str, f: &str, mode: DetlMode) -> (DetlStatus, DetlTruth) {
    let mut t = DetlTruth::False;
    let st = unsafe { detl_eval(ws.0, c(model).as_ptr(), c(world).as_ptr(), c(f).as_ptr(), mode, 0, &mut t) };
    (st, t)
}

#[test]
fn evaluates_in_each_mode() {
    let ws = fixtures("detl");
    assert_eq!(eval(&ws, "M", "w", "~[a]p & ~[b]p", DetlMode::Detl), (DetlStatus::Ok, DetlTruth::True));
    assert_eq!(eval(&ws, "M", "w", "[a]p", DetlMode::Detl), (DetlStatus::Ok, DetlTruth::False));
    assert_eq!(eval(&ws, "M", "w", "[U4@r]p", DetlMode::Rdetl), (DetlStatus::Ok, DetlTruth::NotInScope));
    assert!(last_error().contains("restricted"));
    let y = fixtures("ydel");
    assert_eq!(eval(&y, "M8", "w", "[U8@s][Y]p", DetlMode::Ydel), (DetlStatus::Ok, DetlTruth::True));
}

#[test]
fn errors_carry_messages() {
    let ws = fixtures("detl");
    assert_eq!(eval(&ws, "M", "w", "[a", DetlMode::Detl).0, DetlStatus::Error);
    assert!(last_error().contains("syntax"));
    assert_eq!(eval(&ws, "Nope", "w", "p", DetlMode::Detl).0, DetlStatus::Error);
    let mut t = DetlTruth::False;
    let st = unsafe { detl_eval(ws.0, ptr::null(), c("w").as_ptr(), c("p").as_ptr(), DetlMode::Detl, 0, &mut t) };
    assert_eq!(st, DetlStatus::NullArgument);
    let bad = [0xffu8, 0];
    let st = unsafe { detl_eval(ws.0, bad.as_ptr().cast(), c("w").as_ptr(), c("p").as_ptr(), DetlMode::Detl, 0, &mut t) };
    assert_eq!(st, DetlStatus::InvalidUtf8);
    let st = unsafe { detl_eval(ptr::null(), c("M").as_ptr(), c("w").as_ptr(), c("p").as_ptr(), DetlMode::Detl, 0, &mut t) };
    assert_eq!(st, DetlStatus::NullArgument);
    assert_eq!(eval(&ws, "M", "w", "p", DetlMode::Detl).0, DetlStatus::Ok);
    assert!(detl_last_error().is_null());
}

#[test]
fn loads_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let text = detl::fixtures::DETL.iter().find(|(n, _)| *n == "M").unwrap().1;
    std::fs::write(dir.path().join("N.json"), text).unwrap();
    let mut ws = ptr::null_mut();
    let st = unsafe { detl_workspace_load(c(dir.path().to_str().unwrap()).as_ptr(), &mut ws) };
    assert_eq!(st, DetlStatus::Ok);
    let ws = Ws(ws);
    assert_eq!(eval(&ws, "N", "w", "p & q", DetlMode::Detl), (DetlStatus::Ok, DetlTruth::True));
    let mut other = ptr::null_mut();
    let st = unsafe { detl_workspace_load(c("/nonexistent").as_ptr(), &mut other) };
    assert_eq!(st, DetlStatus::Error);
    assert!(other.is_null());
}

#[test]
fn updates_return_documents() {
    let ws = fixtures("detl");
    let mut out = ptr::null_mut();
    let st = unsafe { detl_update(ws.0, c("M").as_ptr(), c("U2").as_ptr(), DetlMode::Detl, &mut out) };
    assert_eq!(st, DetlStatus::Ok);
    let doc = unsafe { take(out) };
    let m = detl::io::ModelDoc::from_model(
        &detl::semantics::product_update(
            detl::fixtures::detl().unwrap().model("M").unwrap(),
            detl::fixtures::detl().unwrap().action("U2").unwrap(),
        )
        .unwrap(),
        Some("w|s"),
    );
    assert_eq!(doc, m.render());
    let st = unsafe { detl_update(ws.0, c("M").as_ptr(), c("U2").as_ptr(), DetlMode::Rdetl, &mut out) };
    assert_eq!(st, DetlStatus::Error);
}

#[test]
fn checks_and_reduces() {
    let ws = fixtures("detl");
    let mut holds = false;
    let mut report = ptr::null_mut();
    let st = unsafe { detl_check(ws.0, c("M").as_ptr(), c("restricted").as_ptr(), &mut holds, &mut report) };
    assert_eq!(st, DetlStatus::Ok);
    assert!(holds);
    assert_eq!(unsafe { take(report) }, "PASS: restricted");
    let st = unsafe { detl_check(ws.0, c("U2@s").as_ptr(), c("time-advancing").as_ptr(), &mut holds, ptr::null_mut()) };
    assert_eq!(st, DetlStatus::Ok);
    assert!(holds);
    let st = unsafe { detl_check(ws.0, c("M").as_ptr(), c("bogus").as_ptr(), &mut holds, ptr::null_mut()) };
    assert_eq!(st, DetlStatus::Error);

    let mut out = ptr::null_mut();
    let st = unsafe { detl_reduce(ws.0, c("[U2@s][a]p").as_ptr(), &mut out) };
    assert_eq!(st, DetlStatus::Ok);
    let reduced = unsafe { take(out) };
    assert!(!reduced.contains('@'));
    assert_eq!(eval(&ws, "M", "w", &reduced, DetlMode::Detl), eval(&ws, "M", "w", "[U2@s][a]p", DetlMode::Detl));
}

#[test]
fn validity_and_bisimulation() {
    let ws = fixtures("detl");
    let mut valid = false;
    let mut cm = ptr::null_mut();
    let st = unsafe { detl_validity(ws.0, c("[a](p & q) -> [a]p").as_ptr(), 0, &mut valid, &mut cm) };
    assert_eq!(st, DetlStatus::Ok);
    assert!(valid && cm.is_null());
    let st = unsafe { detl_validity(ws.0, c("[a]p -> p").as_ptr(), 0, &mut valid, &mut cm) };
    assert_eq!(st, DetlStatus::Ok);
    assert!(!valid);
    let doc = unsafe { take(cm) };
    let detl::io::Document::Kripke(d) = detl::io::Document::parse(&doc).unwrap() else { panic!() };
    let f = detl::fixtures::detl().unwrap().parse("[a]p -> p").unwrap();
    assert!(!detl::semantics::eval(&d.to_model().unwrap(), d.point.as_deref().unwrap(), &f).unwrap());
    let st = unsafe { detl_validity(ws.0, c("[a](p | q) -> [a]p | [a]q").as_ptr(), 2, &mut valid, ptr::null_mut()) };
    assert_eq!(st, DetlStatus::ResourceExceeded);

    let mut b = false;
    let st = unsafe { detl_bisimilar(ws.0, c("M").as_ptr(), c("w").as_ptr(), c("M").as_ptr(), c("w").as_ptr(), &mut b) };
    assert_eq!(st, DetlStatus::Ok);
    assert!(b);
    let st = unsafe { detl_bisimilar(ws.0, c("M").as_ptr(), c("w").as_ptr(), c("M").as_ptr(), c("u").as_ptr(), &mut b) };
    assert_eq!(st, DetlStatus::Ok);
    assert!(!b);
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/detl.h")).unwrap();
    for f in [
        "detl_workspace_load",
        "detl_workspace_fixtures",
        "detl_workspace_free",
        "detl_eval",
        "detl_update",
        "detl_check",
        "detl_reduce",
        "detl_validity",
        "detl_bisimilar",
        "detl_last_error",
        "detl_string_free",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f}");
    }
    assert!(header.contains("typedef struct DetlWorkspace DetlWorkspace;"));
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"detl.h\"\nint main(void) { DetlWorkspace *ws = 0; DetlTruth t; \
         DetlStatus s = detl_eval(ws, \"M\", \"w\", \"p\", DETL_MODE_DETL, 0, &t); return (int)s; }\n",
    )
    .unwrap();
    let out = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if std::process::Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}
