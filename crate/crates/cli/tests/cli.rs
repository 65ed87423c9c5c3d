use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn here() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn data(name: &str) -> String {
    here().join("data").join(name).to_string_lossy().into_owned()
}

struct Run {
    stdout: String,
    stderr: String,
    code: i32,
}

fn jetfol(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_jetfol")).args(args).output().expect("binary runs");
    Run {
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
        code: out.status.code().expect("exit code"),
    }
}

/// `(golden name, arguments, expected exit code)`; each runs with `--json`.
const GOLDEN: &[(&str, &[&str], i32)] = &[
    ("bracket", &["bracket", "-i", "fields.json"], 0),
    ("apply", &["apply", "-i", "fields.json"], 0),
    ("classify", &["classify", "-i", "general.json"], 0),
    ("primitive", &["primitive", "-i", "form.json"], 0),
    ("primitive_not_closed", &["primitive", "-i", "not_closed.json"], 2),
    ("involutive_frame", &["involutive", "-i", "frame.json"], 0),
    ("involutive_skew", &["involutive", "-i", "skew.json"], 1),
    ("check_atlas_twist", &["check-atlas", "-i", "twist.json", "--adapted", "--extend", "1", "--k-split", "1"], 1),
    ("check_atlas_identity", &["check-atlas", "-i", "identity.json", "--extend", "2"], 0),
    ("obstruction_twist", &["obstruction", "--kind", "atiyah", "-i", "twist.json"], 0),
    ("obstruction_triple", &["obstruction", "--kind", "atiyah", "-i", "triple_plane.json"], 0),
    ("obstruction_normal", &["obstruction", "--kind", "normal", "-i", "twist.json"], 0),
    ("splitting_true", &["verify-splitting", "-i", "split_twist.json"], 0),
    ("splitting_false", &["verify-splitting", "-i", "nosplit_twist.json"], 1),
    ("generators", &["extension-generators", "-i", "generators.json"], 0),
    ("connection", &["connection-matrix", "-i", "euler_x.json"], 0),
    ("bott", &["bott-form", "-i", "euler_x.json"], 0),
    ("residue", &["residue", "-i", "euler_x.json"], 0),
    ("transversal", &["transversal-residue", "-i", "transversal.json"], 0),
    ("oracle", &["oracle-residue", "-i", "euler_x.json"], 0),
    ("oracle_pole", &["oracle-residue", "-i", "pole_on_contour.json"], 2),
    ("flatness", &["flatness", "-i", "fields.json"], 0),
    ("flatness_general", &["flatness", "-i", "general.json"], 2),
    ("broken", &["residue", "-i", "broken.json"], 2),
];

#[test]
fn golden_outputs() {
    let bless = std::env::var_os("JETFOL_BLESS").is_some();
    let mut bad = Vec::new();
    for (name, args, code) in GOLDEN {
        let mut full: Vec<String> = vec!["--json".into()];
        let mut take_file = false;
        for a in *args {
            full.push(if take_file { data(a) } else { a.to_string() });
            take_file = *a == "-i";
        }
        let refs: Vec<&str> = full.iter().map(String::as_str).collect();
        let run = jetfol(&refs);
        let path = here().join("golden").join(format!("{}.json", name));
        if bless {
            fs::write(&path, &run.stdout).unwrap();
        }
        let want = fs::read_to_string(&path).unwrap_or_default();
        if run.stdout != want || run.code != *code {
            bad.push(format!("{}: exit {} (want {})\n{}", name, run.code, code, run.stdout));
        }
        serde_json::from_str::<Value>(&run.stdout).unwrap_or_else(|e| panic!("{}: not JSON: {}", name, e));
    }
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}

#[test]
fn text_mode() {
    let r = jetfol(&["residue", "-i", &data("euler_x.json")]);
    assert_eq!((r.stdout.as_str(), r.code), ("residue = 2\n", 0));
    let r = jetfol(&["primitive", "-i", &data("not_closed.json")]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.is_empty());
    assert!(r.stderr.starts_with("error[NotClosed]: "), "{}", r.stderr);
    let r = jetfol(&["residue", "-i", &data("missing.json")]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error[Io]: "), "{}", r.stderr);
}

#[test]
fn stdin_input() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_jetfol"))
        .args(["residue", "-i", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let doc = fs::read(data("euler_x.json")).unwrap();
    child.stdin.take().unwrap().write_all(&doc).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "residue = 2\n");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(jetfol(&["residue"]).code, 2);
    assert_eq!(jetfol(&["no-such-command"]).code, 2);
    assert_eq!(jetfol(&["oracle-residue", "-i", &data("euler_x.json"), "--samples", "4"]).code, 2);
}

fn exact_value(text: &str) -> f64 {
    match text.split_once('/') {
        Some((n, d)) => n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap(),
        None => text.parse().unwrap(),
    }
}

#[test]
fn residue_agrees_with_oracle_on_the_corpus() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/fields");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let p = path.to_str().unwrap();
        let exact: Value = serde_json::from_str(&jetfol(&["--json", "residue", "-i", p]).stdout).unwrap();
        let numeric: Value = serde_json::from_str(&jetfol(&["--json", "oracle-residue", "-i", p]).stdout).unwrap();
        let want = exact_value(exact["residue"].as_str().unwrap());
        let re = numeric["residue"]["re"].as_f64().unwrap();
        let im = numeric["residue"]["im"].as_f64().unwrap();
        assert!((re - want).abs() <= 1e-8 && im.abs() <= 1e-9, "{}: {} vs {} + {}i", p, want, re, im);
        n += 1;
    }
    assert_eq!(n, 12);
}
