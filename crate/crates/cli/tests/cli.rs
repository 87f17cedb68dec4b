use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lhmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lhmatch")).args(args).output().expect("spawn lhmatch")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL_BDC: &str = r#"
replications = 1000
n_grid = [50, 200]
sigma_grid = [0.0]

[model]
n = 50
m = 3
seed = 8
"#;

#[test]
fn example_fixtures_prints_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = lhmatch(&["example-fixtures", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("manifest:"));
    assert!(out.join("example_fixtures.json").exists());
    assert!(out.join("manifest.json").exists());
}

#[test]
fn audit_bdc_without_violations() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL_BDC);
    let out = tmp.path().join("out");
    let o = lhmatch(&["audit-bdc", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["total_violations"], 0);
    assert_eq!(manifest["command"], "audit-bdc");
}

#[test]
fn same_seed_same_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL_BDC);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let o = lhmatch(&["audit-bdc", "--config", &cfg, "--replications", "200", "--out", dir.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    // config.toml records the output directory and manifest.json the wall clock
    names.retain(|n| n != "manifest.json" && n != "config.toml");
    assert!(names.len() >= 4);
    for name in names {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn bad_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), "replications = 10\n[model]\nn = 50\nm = 3\nsigma = { kind = \"fixed\", value = -1.0 }\n");
    let o = lhmatch(&["audit-bdc", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let unknown = write_config(tmp.path(), "bogus = 1\n[model]\nn = 50\nm = 3\n");
    assert_eq!(lhmatch(&["audit-bdc", "--config", &unknown]).status.code(), Some(2));
    assert_eq!(lhmatch(&["rankdiff"]).status.code(), Some(2));
}

#[test]
fn refuses_to_overwrite() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let args = ["example-fixtures", "--out", out.to_str().unwrap()];
    assert_eq!(lhmatch(&args).status.code(), Some(0));
    assert_eq!(lhmatch(&args).status.code(), Some(4));
}
