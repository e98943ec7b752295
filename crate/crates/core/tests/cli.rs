mod common;

use common::spec_path;
use metacsp::cli::{run, CliOutput};
use std::process::Command;

fn cli(args: &[&str]) -> CliOutput {
    let mut full = vec!["metacsp".to_string()];
    full.extend(args.iter().map(|a| a.to_string()));
    run(full)
}

fn with_spec(cmd: &str, spec: &str, rest: &[&str]) -> CliOutput {
    let path = spec_path(spec);
    let mut args = vec![cmd, path.as_str()];
    args.extend_from_slice(rest);
    cli(&args)
}

#[test]
fn validate_reports_constants() {
    let out = with_spec("validate", "exalpha.json", &[]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("d=16 alpha=4"), "{}", out.stdout);
    let out = with_spec("validate", "unitri11.json", &[]);
    assert!(out.stdout.contains("unitriangular=1,1"), "{}", out.stdout);
}

#[test]
fn collect_and_vector_views() {
    let out = with_spec("collect", "exalpha.json", &["q1^-1 b1"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "q1^-1 b1\n"));
    assert_eq!(
        with_spec("collect", "genbs23.json", &["q1 q1^-1"]).stdout,
        "1\n"
    );
    assert_eq!(
        with_spec("to-vec", "genbs23.json", &["q1b1"]).stdout,
        "v=2 x=1,0\n"
    );
    assert_eq!(
        with_spec("from-vec", "exalpha.json", &["1/2,0,0", "-1,0,0"]).stdout,
        "q1^-1 b1\n"
    );
}

#[test]
fn member_alpha_and_solve() {
    assert_eq!(with_spec("member", "genbs23.json", &["5/36"]).code, 0);
    let out = with_spec("member", "genbs23.json", &["1/7"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.starts_with("reason=not-in-Zd"));
    assert_eq!(with_spec("alpha", "exalpha.json", &[]).stdout, "4\n");

    let dir = tempfile::tempdir().unwrap();
    let n = dir.path().join("n.json");
    std::fs::write(&n, "[[2,0,0],[0,1,0],[0,0,1]]").unwrap();
    let out = with_spec("solve", "exalpha.json", &[n.to_str().unwrap(), "1,0,0"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "solved v=1/2,0,0\n"));
    std::fs::write(&n, "[[0,0,0],[0,1,0],[0,0,1]]").unwrap();
    let out = with_spec("solve", "exalpha.json", &[n.to_str().unwrap(), "1,0,0"]);
    assert!(
        out.stdout.starts_with("reason=no-rational-solution"),
        "{}",
        out.stdout
    );
}

#[test]
fn csp_and_dlog() {
    let out = with_spec("csp", "genbs23.json", &["q1", "q1 b1^-1", "--max-len", "3"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("conjugator="));
    let par = with_spec(
        "csp",
        "genbs23.json",
        &["q1", "q1 b1^-1", "--max-len", "3", "--parallel", "3"],
    );
    assert_eq!(par, out);
    let out = with_spec("csp", "genbs23.json", &["q1", "q2"]);
    assert!(out.stdout.starts_with("reason=q-parts-differ"));

    let out = with_spec("dlog", "genbs10_2.json", &["q1 b1", "q1 b1^7"]);
    assert_eq!(out.stdout, "conjugator=b1^10 q2^4 c=10 y=0,4\n");
    let out = with_spec("dlog", "genbs10_2.json", &["q1 b1", "q1 b1^3"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.starts_with("reason=not-found"));
}

#[test]
fn malformed_input_exits_2() {
    assert_eq!(with_spec("collect", "genbs23.json", &["q3"]).code, 2);
    assert_eq!(with_spec("collect", "genbs23.json", &["q1("]).code, 2);
    assert_eq!(with_spec("member", "exalpha.json", &["1,2"]).code, 2);
    assert_eq!(cli(&["validate", "/nonexistent/spec.json"]).code, 2);
    assert_eq!(cli(&["frobnicate"]).code, 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n":2,"s":1,"matrices":[[[2]],[[0]]]}"#).unwrap();
    assert_eq!(cli(&["validate", bad.to_str().unwrap()]).code, 2);
}

#[test]
fn bench_csv_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let read_rows = |name: &str, seed: &str| {
        let out_path = dir.path().join(name);
        let out = with_spec(
            "bench",
            "genbs23.json",
            &[
                "--lengths",
                "1,2",
                "--trials",
                "2",
                "--seed",
                seed,
                "--out",
                out_path.to_str().unwrap(),
            ],
        );
        assert_eq!(out.code, 0, "{}", out.stderr);
        let text = std::fs::read_to_string(out_path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("length,trial,seconds,conjugator_len"));
        // drop the timing column, which varies between runs
        lines
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                format!("{},{},{}", f[0], f[1], f[3])
            })
            .collect::<Vec<_>>()
    };
    let a = read_rows("a.csv", "5");
    assert_eq!(a.len(), 4);
    assert_eq!(a, read_rows("b.csv", "5"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_metacsp");
    let ok = Command::new(bin)
        .args(["alpha", &spec_path("exalpha.json")])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "4\n");
    let fail = Command::new(bin)
        .args(["member", &spec_path("genbs23.json"), "1/7"])
        .output()
        .unwrap();
    assert_eq!(fail.status.code(), Some(1));
    let usage = Command::new(bin).args(["collect"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    assert!(!usage.stderr.is_empty());
}
