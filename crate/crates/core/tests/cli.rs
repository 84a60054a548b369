//! Drives the binary end to end: exit codes, report envelope, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qvariant")).args(args).output().expect("binary runs")
}

struct Fixtures {
    dir: tempfile::TempDir,
}

impl Fixtures {
    fn new() -> Self {
        let f = Fixtures { dir: tempfile::tempdir().unwrap() };
        let h = std::f64::consts::FRAC_1_SQRT_2;
        f.write(
            "bell.json",
            r#"{"qubits": 2, "steps": [{"gate": "H", "targets": [0]}, {"gate": "CNOT", "targets": [0, 1]}]}"#,
        );
        f.write("hadamard.json", &format!("[[{h}, {h}], [{h}, {}]]", -h));
        f.write("flip.json", "[[1, 0], [0, -1]]");
        f.write("rotation.json", "[[0, -1], [1, 0]]");
        f.write("few.txt", "3\n00010100\n");
        f.write("many.txt", "3\n11101101\n");
        f.write("none.txt", "4\n0x0000\n");
        f
    }

    fn write(&self, name: &str, text: &str) {
        std::fs::write(self.dir.path().join(name), text).unwrap();
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).display().to_string()
    }
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn check_envelope(v: &Value, subcommand: &str) {
    assert_eq!(v["subcommand"], subcommand);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert!(v["seed"].is_u64());
    assert!(v["config"].is_object());
    assert!(v["pass"].is_boolean());
}

#[test]
fn every_subcommand_reports_and_sets_its_exit_code() {
    let f = Fixtures::new();
    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["simulate".into(), "--circuit".into(), f.path("bell.json"), "--p".into(), "2".into()], 0),
        (vec!["check-norm".into(), "--matrix".into(), f.path("hadamard.json"), "--p".into(), "4".into()], 1),
        (vec!["check-norm".into(), "--matrix".into(), f.path("rotation.json"), "--p".into(), "4".into()], 0),
        (vec!["postbqp".into(), "--truth-table".into(), f.path("few.txt"), "--mode".into(), "exact".into()], 0),
        (
            vec!["postbqp".into(), "--truth-table".into(), f.path("many.txt"), "--mode".into(), "sampled".into(), "--trials".into(), "200".into()],
            0,
        ),
        (vec!["or-solve".into(), "--truth-table".into(), f.path("none.txt")], 0),
        (vec!["gadget".into(), "--p".into(), "1".into(), "--ancillas".into(), "6".into(), "--truth-table".into(), f.path("few.txt")], 0),
        (vec!["discriminate".into(), "--d".into(), "3".into(), "--p".into(), "4".into(), "--trials".into(), "20000".into()], 0),
        (vec!["signal".into(), "--scenario".into(), "option-ii".into(), "--epsilon".into(), "0.5".into()], 0),
        (vec!["signal".into(), "--scenario".into(), "option-i".into(), "--p".into(), "4".into(), "--trials".into(), "100".into()], 0),
        (vec!["signal".into(), "--scenario".into(), "multistate".into(), "--d".into(), "3".into(), "--p".into(), "36".into()], 0),
        (vec!["sqrt".into(), "--matrix".into(), f.path("flip.json")], 1),
        (vec!["sqrt".into(), "--matrix".into(), f.path("flip.json"), "--embed".into()], 0),
        (vec!["sqrt".into(), "--matrix".into(), f.path("flip.json"), "--field".into(), "complex".into()], 0),
        (vec!["island-scan".into(), "--n".into(), "2".into(), "--p".into(), "3".into(), "--trials".into(), "300".into()], 0),
    ];
    for (args, code) in cases {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = bin(&argv);
        assert_eq!(out.status.code(), Some(code), "{argv:?}: {}", String::from_utf8_lossy(&out.stderr));
        let v = report(&out);
        check_envelope(&v, &args[0]);
        assert_eq!(v["pass"], code == 0);
    }
}

#[test]
fn specific_results() {
    let f = Fixtures::new();
    let v = report(&bin(&["check-norm", "--matrix", &f.path("hadamard.json"), "--p", "4"]));
    assert_eq!(v["result"]["numeric"]["witness"]["vector"], serde_json::json!([[1.0, 0.0], [0.0, 0.0]]));

    let v = report(&bin(&["postbqp", "--truth-table", &f.path("few.txt")]));
    assert_eq!(v["result"]["decision"]["verdict"], "LessThanHalf");
    assert_eq!(v["result"]["oracle"], "LessThanHalf");

    let v = report(&bin(&["sqrt", "--matrix", &f.path("flip.json")]));
    assert_eq!(v["result"]["obstruction"], "determinant_negative");
}

#[test]
fn identical_arguments_give_identical_bytes() {
    let f = Fixtures::new();
    let argsets: [Vec<String>; 3] = [
        vec!["discriminate".into(), "--d".into(), "5".into(), "--seed".into(), "11".into(), "--trials".into(), "5000".into()],
        vec!["island-scan".into(), "--n".into(), "3".into(), "--seed".into(), "4".into(), "--trials".into(), "200".into()],
        vec!["simulate".into(), "--circuit".into(), f.path("bell.json"), "--trials".into(), "64".into(), "--seed".into(), "5".into()],
    ];
    for args in &argsets {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(bin(&argv).stdout, bin(&argv).stdout, "{argv:?}");
    }
}

#[test]
fn out_and_csv() {
    let f = Fixtures::new();
    let target: PathBuf = Path::new(&f.path("report.csv")).to_path_buf();
    let out = bin(&["signal", "--scenario", "option-ii", "--format", "csv", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("action,outcome,probability\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn usage_errors_exit_with_two() {
    let f = Fixtures::new();
    for argv in [
        vec!["frobnicate"],
        vec!["discriminate", "--unknown-flag"],
        vec!["discriminate", "--format", "xml"],
        vec!["simulate"],
        vec!["sqrt", "--matrix", "/definitely/missing.json"],
        vec!["signal", "--scenario", "option-i", "--p", "2"],
    ] {
        let out = bin(&argv);
        assert_eq!(out.status.code(), Some(2), "{argv:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
    f.write("bad.txt", "3\n0101\n");
    assert_eq!(bin(&["postbqp", "--truth-table", &f.path("bad.txt")]).status.code(), Some(2));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}
