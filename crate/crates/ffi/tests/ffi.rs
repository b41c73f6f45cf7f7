use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use rcspkit_ffi::*;

const NAE: &str = "rel NAE 3 over 2\n0 0 1\n0 1 0\n0 1 1\n1 0 0\n1 0 1\n1 1 0\n";
const IMPL_PATH: &str = "domain 2\nrel IMPL 2 { 0 0 ; 0 1 ; 1 1 }\ncst IMPL x y\ncst IMPL y z\nstart 0 0 0\ntarget 1 1 1\n";

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(rcsp_last_error()) }.to_str().unwrap().to_string()
}

#[test]
fn relation_flags_and_shape() {
    let text = c(NAE);
    let mut rel = ptr::null_mut();
    unsafe {
        assert_eq!(rcsp_relation_parse(text.as_ptr(), ptr::null(), &mut rel), RcspStatus::Ok);
        let (mut d, mut arity, mut len) = (0u32, 0usize, 0usize);
        assert_eq!(rcsp_relation_shape(rel, &mut d, &mut arity, &mut len), RcspStatus::Ok);
        assert_eq!((d, arity, len), (2, 3, 6));
        let mut flags = RcspBooleanFlags::default();
        assert_eq!(rcsp_relation_boolean_flags(rel, &mut flags), RcspStatus::Ok);
        assert_eq!(flags, RcspBooleanFlags::default());
        let mut inv = true;
        let order = [0u32, 1];
        assert_eq!(rcsp_relation_maltsev_invariant(rel, order.as_ptr(), 2, &mut inv), RcspStatus::Ok);
        assert!(!inv);
        rcsp_relation_free(rel);
    }
}

#[test]
fn digraph_total_rectangularity() {
    let c63 = c("rel C 2 over 6\n0 3\n3 0\n1 4\n4 1\n2 5\n5 2\n");
    let k3 = c("rel K 2 over 3\n0 1\n1 0\n0 2\n2 0\n1 2\n2 1\n");
    for (text, want) in [(c63, true), (k3, false)] {
        let mut rel = ptr::null_mut();
        let mut holds = !want;
        unsafe {
            assert_eq!(rcsp_relation_parse(text.as_ptr(), ptr::null(), &mut rel), RcspStatus::Ok);
            assert_eq!(rcsp_relation_totally_rectangular(rel, &mut holds), RcspStatus::Ok);
            rcsp_relation_free(rel);
        }
        assert_eq!(holds, want);
    }
}

#[test]
fn language_verdict_report_and_order() {
    let text = c(NAE);
    let mut lang = ptr::null_mut();
    unsafe {
        assert_eq!(rcsp_language_parse(text.as_ptr(), &mut lang), RcspStatus::Ok);
        let mut poly = true;
        assert_eq!(rcsp_language_is_polynomial(lang, &mut poly), RcspStatus::Ok);
        assert!(!poly);
        let mut report = ptr::null_mut();
        assert_eq!(rcsp_language_report(lang, true, &mut report), RcspStatus::Ok);
        let s = CStr::from_ptr(report).to_str().unwrap().to_string();
        rcsp_string_free(report);
        assert!(s.ends_with("dichotomy=PSPACE-complete\n"));
        let mut found = true;
        let mut order = [9u32; 2];
        assert_eq!(rcsp_language_find_order(lang, order.as_mut_ptr(), 2, &mut found), RcspStatus::Ok);
        assert!(!found);
        rcsp_language_free(lang);
    }

    let text = c(IMPL_PATH);
    let mut lang = ptr::null_mut();
    unsafe {
        assert_eq!(rcsp_language_parse(text.as_ptr(), &mut lang), RcspStatus::Ok);
        let mut found = false;
        let mut order = [9u32; 2];
        assert_eq!(rcsp_language_find_order(lang, order.as_mut_ptr(), 1, &mut found), RcspStatus::ValidationError);
        assert_eq!(rcsp_language_find_order(lang, order.as_mut_ptr(), 2, &mut found), RcspStatus::Ok);
        assert!(found);
        assert_eq!(order, [0, 1]);
        rcsp_language_free(lang);
    }
}

#[test]
fn instance_solve() {
    let text = c(IMPL_PATH);
    let mut inst = ptr::null_mut();
    unsafe {
        assert_eq!(rcsp_instance_parse(text.as_ptr(), &mut inst), RcspStatus::Ok);
        let mut connected = false;
        let mut method = RcspMethod::Bfs;
        assert_eq!(rcsp_instance_solve(inst, &mut connected, &mut method), RcspStatus::Ok);
        assert!(connected);
        assert_eq!(method, RcspMethod::Greedy);
        rcsp_instance_free(inst);
    }
}

#[test]
fn error_codes() {
    let mut rel = ptr::null_mut();
    unsafe {
        assert_eq!(rcsp_relation_parse(ptr::null(), ptr::null(), &mut rel), RcspStatus::NullPointer);
        let bad = c("rel R 2 over 2\n0 7\n");
        assert_eq!(rcsp_relation_parse(bad.as_ptr(), ptr::null(), &mut rel), RcspStatus::ParseError);
        assert!(!last_error().is_empty());
        let not_utf8 = [0xffu8, 0xfe, 0];
        assert_eq!(
            rcsp_relation_parse(not_utf8.as_ptr().cast(), ptr::null(), &mut rel),
            RcspStatus::InvalidUtf8
        );
        let bad_start = c("domain 2\nrel A 2 { 0 1 }\ncst A x y\nstart 1 1\ntarget 0 1\n");
        let mut inst = ptr::null_mut();
        assert_eq!(rcsp_instance_parse(bad_start.as_ptr(), &mut inst), RcspStatus::ParseError);

        // 30 variables exceed the oracle cap and NAE has no preserving order
        let vars: Vec<String> = (1..=30).map(|i| format!("x{i}")).collect();
        let cst: String = vars.windows(3).map(|w| format!("cst N {} {} {}\n", w[0], w[1], w[2])).collect();
        let alternating = |offset: usize| (0..30).map(|i| ((i + offset) % 2).to_string()).collect::<Vec<_>>().join(" ");
        let big = c(&format!(
            "domain 2\nrel N 3 {{ 0 0 1 ; 0 1 0 ; 0 1 1 ; 1 0 0 ; 1 0 1 ; 1 1 0 }}\n{cst}start {}\ntarget {}\n",
            alternating(0),
            alternating(1)
        ));
        assert_eq!(rcsp_instance_parse(big.as_ptr(), &mut inst), RcspStatus::Ok);
        let mut connected = false;
        let mut method = RcspMethod::Bfs;
        assert_eq!(rcsp_instance_solve(inst, &mut connected, &mut method), RcspStatus::NoMethod);
        rcsp_instance_free(inst);

        let ok = c(NAE);
        assert_eq!(rcsp_relation_parse(ok.as_ptr(), ptr::null(), &mut rel), RcspStatus::Ok);
        assert!(last_error().is_empty());
        assert_eq!(rcsp_relation_boolean_flags(rel, ptr::null_mut()), RcspStatus::NullPointer);
        rcsp_relation_free(rel);
        rcsp_relation_free(ptr::null_mut());
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// The static library built alongside this test, if cargo placed it where expected.
fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("librcspkit_ffi.a");
    lib.exists().then_some(lib)
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(crate_dir().join("include/rcspkit.h")).unwrap();
    for name in [
        "rcsp_last_error",
        "rcsp_relation_parse",
        "rcsp_language_is_polynomial",
        "rcsp_instance_solve",
        "RCSP_STATUS_NO_METHOD = 6",
        "typedef struct RcspInstance RcspInstance;",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn c_program_links_and_runs() {
    let Some(lib) = static_lib() else {
        eprintln!("static library not found; skipping");
        return;
    };
    if !have_cc() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let out_dir = std::env::temp_dir().join(format!("rcspkit-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&out_dir).unwrap();
    let exe = out_dir.join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(Path::new(&exe)).output().unwrap();
    assert!(run.status.success(), "smoke program exited with {:?}", run.status);
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}
