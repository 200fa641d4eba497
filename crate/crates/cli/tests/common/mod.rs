//! Helpers shared by the binary's test targets.
#![allow(dead_code)] // each test target uses its own subset

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

/// The seven-step reference sequence used throughout the tests.
pub const REF_STEPS: &str = "0,0.78,1.81,3.11,4.54,5.93,7.24";
/// Its constraint window: zero response at these frequencies, unit at +1.
pub const REF_ZEROS: &str = "-2,-1,0,2,3,4";

pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasestep"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

pub fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be UTF-8")
}

pub fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr should be UTF-8")
}

pub fn exit_code(out: &Output) -> i32 {
    out.status
        .code()
        .expect("process should exit, not die on a signal")
}

pub fn assert_success(out: &Output) {
    assert!(out.status.success(), "command failed: {}", stderr_of(out));
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("temp paths are UTF-8")
}

/// Writes the reference seven-step design to `out` via the binary.
pub fn make_reference_design(out: &Path) {
    assert_success(&run(&[
        "design",
        "--steps",
        REF_STEPS,
        "--zeros",
        REF_ZEROS,
        "--out",
        path_str(out),
    ]));
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap())
        .unwrap_or_else(|e| panic!("{} should hold JSON: {e}", path.display()))
}

/// Sorted (name, bytes) listing of a directory's plain files.
pub fn dir_snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    entries.sort();
    entries
}
