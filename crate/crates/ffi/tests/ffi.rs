use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use boostcycle_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take_string(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    bc_string_free(p);
    s
}

unsafe fn last_error() -> String {
    let p = bc_last_error_message();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

unsafe fn golden_pool() -> *mut BcPool {
    let mut pool = ptr::null_mut();
    assert_eq!(
        bc_pool_parse(cstr("-++\n+-+\n++-\n").as_ptr(), &mut pool),
        BcStatus::Ok
    );
    pool
}

#[test]
fn exact_run_gives_fibonacci_edges() {
    unsafe {
        let pool = golden_pool();
        let (mut n, mut m) = (0, 0);
        assert_eq!(bc_pool_shape(pool, &mut n, &mut m), BcStatus::Ok);
        assert_eq!((n, m), (3, 3));
        let mut trace = ptr::null_mut();
        assert_eq!(
            bc_run(pool, ptr::null(), BcMode::Exact, 6, &mut trace),
            BcStatus::Ok
        );
        let expected = ["1/3", "1/2", "2/3", "3/5", "5/8", "8/13"];
        for (k, want) in expected.iter().enumerate() {
            let mut text = ptr::null_mut();
            assert_eq!(bc_trace_edge_text(trace, k, &mut text), BcStatus::Ok);
            assert_eq!(take_string(text), *want);
        }
        let mut edge = 0.0;
        assert_eq!(
            bc_trace_step(trace, 6, &mut edge, ptr::null_mut()),
            BcStatus::OutOfRange
        );
        assert!(last_error().contains("outside"));
        bc_trace_free(trace);
        bc_pool_free(pool);
    }
}

#[test]
fn json_round_trip_and_cycle_report() {
    unsafe {
        let pool = golden_pool();
        let mut trace = ptr::null_mut();
        let rule = cstr("first-above:0.4");
        assert_eq!(
            bc_run(pool, rule.as_ptr(), BcMode::Float, 400, &mut trace),
            BcStatus::Ok
        );
        let mut json = ptr::null_mut();
        assert_eq!(bc_trace_to_json(trace, &mut json), BcStatus::Ok);
        let text = take_string(json);
        let mut back = ptr::null_mut();
        assert_eq!(
            bc_trace_from_json(cstr(&text).as_ptr(), &mut back),
            BcStatus::Ok
        );
        let mut json2 = ptr::null_mut();
        assert_eq!(bc_trace_to_json(back, &mut json2), BcStatus::Ok);
        assert_eq!(take_string(json2), text);

        let mut report = ptr::null_mut();
        assert_eq!(
            bc_detect_cycle(back, ptr::null(), &mut report),
            BcStatus::Ok
        );
        assert!(!report.is_null());
        let (mut period, mut edge_period, mut phase, mut mean, mut nabla) = (0, 0, 0, 0.0, false);
        assert_eq!(
            bc_cycle_summary(
                report,
                &mut period,
                &mut edge_period,
                &mut phase,
                &mut mean,
                &mut nabla
            ),
            BcStatus::Ok
        );
        assert_eq!((period, edge_period), (4, 2));
        assert!(nabla);
        let mut values = [0.0; 2];
        for (i, v) in values.iter_mut().enumerate() {
            assert_eq!(bc_cycle_edge_value(report, i, v), BcStatus::Ok);
        }
        values.sort_by(f64::total_cmp);
        assert!((values[0] - (2f64.sqrt() - 1.0)).abs() < 1e-9);
        assert!((values[1] - 0.5f64.sqrt()).abs() < 1e-9);
        let mut word = ptr::null_mut();
        assert_eq!(bc_cycle_farey_word(report, &mut word), BcStatus::Ok);
        assert_eq!(take_string(word), "LR");

        bc_cycle_free(report);
        bc_trace_free(back);
        bc_trace_free(trace);
        bc_pool_free(pool);
    }
}

#[test]
fn short_trace_has_no_cycle() {
    unsafe {
        let pool = golden_pool();
        let mut trace = ptr::null_mut();
        assert_eq!(
            bc_run(pool, ptr::null(), BcMode::Float, 4, &mut trace),
            BcStatus::Ok
        );
        let mut report = ptr::null_mut();
        let cfg = bc_cycle_config_default();
        assert_eq!(bc_detect_cycle(trace, &cfg, &mut report), BcStatus::Ok);
        assert!(report.is_null());
        let bad = BcCycleConfig {
            tol: f64::NAN,
            ..cfg
        };
        assert_eq!(
            bc_detect_cycle(trace, &bad, &mut report),
            BcStatus::InvalidArgument
        );
        bc_trace_free(trace);
        bc_pool_free(pool);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut pool = ptr::null_mut();
        assert_eq!(
            bc_pool_parse(cstr("+-x\n").as_ptr(), &mut pool),
            BcStatus::Parse
        );
        assert!(pool.is_null());
        assert_eq!(bc_pool_parse(ptr::null(), &mut pool), BcStatus::NullPointer);
        assert!(last_error().contains("null"));

        let pool = golden_pool();
        let mut trace = ptr::null_mut();
        assert_eq!(
            bc_run(pool, ptr::null(), BcMode::Float, 0, &mut trace),
            BcStatus::Engine
        );
        let mut w = [0.0; 2];
        assert_eq!(
            bc_run(pool, ptr::null(), BcMode::Float, 3, &mut trace),
            BcStatus::Ok
        );
        assert_eq!(
            bc_trace_weights(trace, 0, w.as_mut_ptr(), 2),
            BcStatus::InvalidArgument
        );
        assert_eq!(
            bc_trace_from_json(cstr("{}").as_ptr(), &mut trace),
            BcStatus::Parse
        );
        bc_trace_free(trace);
        bc_pool_free(pool);

        let mut value = 0.0;
        assert_eq!(
            bc_farey_periodic_point(cstr("RQ").as_ptr(), ptr::null_mut(), &mut value),
            BcStatus::Parse
        );
        let mut exact = ptr::null_mut();
        assert_eq!(
            bc_farey_periodic_point(cstr("R").as_ptr(), &mut exact, &mut value),
            BcStatus::Ok
        );
        assert_eq!(take_string(exact), "(-1/2+1/2*sqrt(5))");
        assert!((value - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        bc_string_free(ptr::null_mut());
        bc_pool_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api() {
    let header =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/boostcycle.h"))
            .unwrap();
    for name in [
        "bc_pool_parse",
        "bc_run",
        "bc_trace_to_json",
        "bc_detect_cycle",
        "bc_cycle_summary",
        "bc_farey_periodic_point",
        "bc_string_free",
        "typedef struct BcTrace BcTrace",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

fn artifact_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf()
}

#[test]
fn c_program_links_against_the_library() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib_dir = artifact_dir();
    if !lib_dir.join("libboostcycle_ffi.so").exists() {
        eprintln!("skipping: no shared library in {}", lib_dir.display());
        return;
    }
    let dir = tempfile_dir();
    let exe = dir.join("smoke");
    let compiled = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .args(["-lboostcycle_ffi", "-lm", "-o"])
        .arg(&exe)
        .status();
    match compiled {
        Ok(s) => assert!(s.success(), "C compilation failed"),
        Err(e) => {
            eprintln!("skipping: no C compiler ({e})");
            return;
        }
    }
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
    let _ = std::fs::remove_dir_all(dir);
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("boostcycle-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
