//! Compiles and runs a C program against the generated header and static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "hsenergy.h"

int main(void) {
    HseScenario *sc = NULL;
    HseSolution *sol = NULL;
    double e = 0.0, err = 0.0;
    if (hse_scenario_new("standing", 128, &sc) != HSE_STATUS_OK) return 10;
    if (hse_solve(sc, &sol) != HSE_STATUS_OK) return 11;
    if (hse_surface_energy(sol, "{\"kind\":\"constant\",\"value\":0.5}", &e) != HSE_STATUS_OK) return 12;
    if (hse_solution_max_error(sol, &err) != HSE_STATUS_OK) return 13;
    HseScenario *bad = NULL;
    if (hse_scenario_new("nope", 0, &bad) != HSE_STATUS_CONFIG) return 14;
    char msg[256];
    size_t need = 0;
    if (hse_last_error(msg, sizeof msg, &need) != HSE_STATUS_OK || strlen(msg) + 1 != need) return 15;
    printf("%.12f %.3e\n", e, err);
    hse_solution_free(sol);
    hse_scenario_free(sc);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // .../target/<profile>/deps/<test-binary>
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libhsenergy_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.is_file() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(root.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    let e: f64 = text.split_whitespace().next().unwrap().parse().unwrap();
    let exact = std::f64::consts::PI.powi(2) / 2.0;
    assert!((e - exact).abs() / exact < 1e-3, "{text}");
}
