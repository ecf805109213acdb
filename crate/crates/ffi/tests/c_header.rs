//! Compiles a C program against the generated header and the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

/// `cargo test` only builds the rlib, so build the static library here, in a
/// separate target directory to stay clear of the outer build lock.
fn build_static_lib() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    // <target>/<profile>/deps/<this test binary>
    let target = exe.ancestors().nth(3).unwrap().join("c-link");
    let status = Command::new(env!("CARGO"))
        .args(["build", "--quiet", "-p", "tvwalk-ffi", "--target-dir"])
        .arg(&target)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .status()
        .expect("cargo runs");
    assert!(status.success(), "building the static library failed");
    target.join("debug/libtvwalk_ffi.a")
}

#[test]
fn header_declares_the_api() {
    let header =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/tvwalk.h"))
            .unwrap();
    for name in [
        "tv_last_error",
        "tv_group_order",
        "tv_matrix_identity",
        "tv_matrix_free",
        "tv_keygen",
        "tv_respond_honest",
        "tv_respond_dishonest",
        "tv_verify",
        "tv_mixing_times",
        "typedef struct TvMatrix TvMatrix",
        "TV_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = build_static_lib();
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out = tempfile_dir().join("session");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/session.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("a C compiler is installed");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
    std::fs::remove_dir_all(out.parent().unwrap()).unwrap();
}

fn tempfile_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("tvwalk-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
