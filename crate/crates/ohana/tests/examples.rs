//! Runs every example program and checks it exits cleanly.

use std::path::PathBuf;
use std::process::Command;

#[test]
fn examples_run() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let mut names: Vec<String> = std::fs::read_dir(manifest.join("examples"))
        .unwrap()
        .filter_map(|e| e.ok()?.path().file_stem()?.to_str().map(String::from))
        .collect();
    names.sort();
    assert!(names.len() >= 8);
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    for name in names {
        let out = Command::new(&cargo)
            .args(["run", "-q", "--example", &name])
            .current_dir(&manifest)
            .output()
            .unwrap();
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stdout.is_empty(), "{name} printed nothing");
    }
}
