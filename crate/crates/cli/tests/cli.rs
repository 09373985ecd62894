use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use trustview_core::gate::{read_public, SignedRequest};

fn trustview(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trustview")).args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn keygen(dir: &Path, seed: &str) -> (String, String) {
    let prefix = dir.join("key");
    let out = trustview(&["keygen", "--out", p(&prefix), "--seed", seed]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    (format!("{}.key", prefix.display()), format!("{}.pub", prefix.display()))
}

fn generate(dir: &Path, scenario: &str, seed: &str) {
    let out = trustview(&["fixtures", "gen", "--scenario", scenario, "--seed", seed, "--out", p(dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn verify(dir: &Path, key: &str, extra: &[&str]) -> Output {
    let session = dir.join("session.json");
    let request = dir.join("request.txt");
    let mut args = vec!["verify", "--session", p(&session), "--request", p(&request), "--key", key];
    args.extend_from_slice(extra);
    trustview(&args)
}

#[test]
fn benign_session_is_signed() {
    let tmp = tempfile::tempdir().unwrap();
    let (key, public) = keygen(tmp.path(), "3");
    let dir = tmp.path().join("s");
    generate(&dir, "benign", "4");
    let out = verify(&dir, &key, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let signed = SignedRequest::read(&dir.join("signature.txt")).unwrap();
    assert!(signed.verify(&read_public(Path::new(&public)).unwrap()));
    let verdict: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("verdict.json")).unwrap()).unwrap();
    assert_eq!(verdict["signed"], true);
    assert_eq!(verdict["corpus"], "benign");
    assert_eq!(verdict["verdict"]["status"], "intended");
}

#[test]
fn attack_session_exits_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let (key, _) = keygen(tmp.path(), "3");
    let dir = tmp.path().join("s");
    generate(&dir, "min-tamper", "1");
    let out = verify(&dir, &key, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("text_mismatch"));
    assert!(!dir.join("signature.txt").exists());
}

#[test]
fn missing_breakdown_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let (key, _) = keygen(tmp.path(), "3");
    let dir = tmp.path().join("s");
    generate(&dir, "benign", "0");
    fs::remove_file(dir.join("breakdown.json")).unwrap();
    let out = verify(&dir, &key, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("breakdown.json"));
}

#[test]
fn bad_flags_are_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let (key, _) = keygen(tmp.path(), "3");
    let dir = tmp.path().join("s");
    generate(&dir, "benign", "0");
    assert_eq!(verify(&dir, &key, &["--ocr-engine", "tesseract"]).status.code(), Some(1));
    assert_eq!(verify(&dir, &key, &["--hsv-threshold", "0"]).status.code(), Some(1));
    assert_eq!(verify(&dir, &key, &["--min-confidence", "120"]).status.code(), Some(1));
}

#[test]
fn keygen_seeds_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (ka, pa) = keygen(a.path(), "9");
    let (kb, pb) = keygen(b.path(), "9");
    assert_eq!(fs::read(&ka).unwrap(), fs::read(&kb).unwrap());
    assert_eq!(fs::read(&pa).unwrap(), fs::read(&pb).unwrap());

    let prefix = b.path().join("fresh");
    assert!(trustview(&["keygen", "--out", p(&prefix)]).status.success());
    assert_ne!(fs::read(prefix.with_extension("pub")).unwrap(), fs::read(&pa).unwrap());
}

#[test]
fn report_groups_verdicts() {
    let tmp = tempfile::tempdir().unwrap();
    let (key, _) = keygen(tmp.path(), "3");
    let dir = tmp.path().join("s");
    generate(&dir, "temporal", "2");
    assert_eq!(verify(&dir, &key, &[]).status.code(), Some(2));

    let out = trustview(&["report", p(&dir.join("verdict.json"))]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("corpus,frames,"));
    let cols: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cols[0], "temporal");
    assert_eq!(&cols[5..], ["1", "0", "0", "0"]);

    let empty = trustview(&["report"]);
    assert!(empty.status.success());
    assert_eq!(String::from_utf8(empty.stdout).unwrap().lines().count(), 1);
}
