//! Runs the `signhdg` binary: exit codes, error lines and precedence of
//! command-line flags over config files.

use std::fs;
use std::process::Command;

fn signhdg(args: &[&str]) -> (bool, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_signhdg")).args(args).output().expect("binary runs");
    (out.status.success(), String::from_utf8_lossy(&out.stdout).into(), String::from_utf8_lossy(&out.stderr).into())
}

#[test]
fn flags_override_the_file_which_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.cfg");
    fs::write(&file, "k = 3\nkappa = -1.5\n# comment\npattern = uniform\n").unwrap();
    let (ok, stdout, _) = signhdg(&["config", "--config", file.to_str().unwrap(), "--k", "2"]);
    assert!(ok);
    assert!(stdout.contains("k = 2\n"));
    assert!(stdout.contains("kappa = -1.5\n"));
    assert!(stdout.contains("pattern = uniform\n"));
    assert!(stdout.contains("gamma = 1.0\n"));
}

#[test]
fn errors_are_machine_parsable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cases: [(&[&str], &str); 4] = [
        (&["study", "--levels", "8,4", "--out", out], "error: cli: "),
        (&["study", "--kappa", "-1", "--levels", "2", "--out", out], "error: problems: "),
        (&["fields", "--levels", "2", "--slice", "x2=5", "--out", out], "error: cli: "),
        (&["study", "--method", "cg", "--k", "0", "--out", out], "error: cli: "),
    ];
    for (args, prefix) in cases {
        let (ok, _, stderr) = signhdg(args);
        assert!(!ok, "{args:?}");
        assert!(stderr.lines().any(|l| l.starts_with(prefix)), "{args:?}: {stderr}");
    }
}

#[test]
fn study_writes_tables_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (ok, stdout, stderr) = signhdg(&["study", "--levels", "2,4", "--method", "hdg,cg", "--k", "1", "--out", out]);
    assert!(ok, "{stderr}");
    assert_eq!(stdout.lines().count(), 5);
    let hdg = fs::read_to_string(dir.path().join("convergence_hdg.csv")).unwrap();
    let cg = fs::read_to_string(dir.path().join("convergence_cg.csv")).unwrap();
    assert_eq!(hdg.lines().count(), 3);
    // CG has no post-processed column
    assert!(cg.lines().nth(2).unwrap().ends_with(",,"));
    let meta = fs::read_to_string(dir.path().join("study.meta")).unwrap();
    let parsed = signhdg_cli::RunConfig::from_text(&meta).unwrap();
    assert_eq!(parsed.levels, vec![2, 4]);
}
