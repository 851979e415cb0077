use std::path::Path;
use std::process::{Command, Output};

fn zd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zd-dilemma"))
        .args(args)
        .env_remove("ZD_DILEMMA_OUT")
        .output()
        .expect("run zd-dilemma")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn exit_codes_by_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let bad_json = dir.path().join("bad.json");
    std::fs::write(&bad_json, "{\"strategy\": \"wsls\", \"bogus\": 1}").unwrap();
    let missing = dir.path().join("missing.json");
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["zd", "set", "--p1", "0.8", "--p4", "0.1"], 0),
        (vec!["--help"], 0),
        // usage errors
        (vec!["frobnicate"], 2),
        (vec!["payoff", "--x", "wsls"], 2),
        // domain errors
        (
            vec!["payoff", "--x", "wsls", "--y", "alld", "--m", "1.5"],
            2,
        ),
        (vec!["payoff", "--x", "0.1,0.2,0.3,1.2", "--y", "alld"], 2),
        (
            vec![
                "zd", "extort", "--s", "0.5", "--phi", "0.2", "--r", "3", "--c", "4",
            ],
            2,
        ),
        // config and io errors
        (vec!["cloud", "--config", bad_json.to_str().unwrap()], 2),
        (vec!["cloud", "--config", missing.to_str().unwrap()], 2),
        // infeasible parameters
        (vec!["zd", "extort", "--s", "0.5", "--phi", "0.5"], 1),
        (vec!["zd", "extort", "--s", "1.2", "--phi", "0.1"], 1),
        (vec!["zd", "set", "--p1", "0.2", "--p4", "0.9"], 1),
        // reducible chain: analytic route has no unique answer
        (vec!["stationary", "--x", "wsls", "--y", "tft"], 1),
    ];
    for (args, code) in cases {
        let o = zd(&args);
        assert_eq!(
            o.status.code(),
            Some(code),
            "{args:?}: {}{}",
            stdout(&o),
            stderr(&o)
        );
    }
}

#[test]
fn extort_summary() {
    let o = zd(&["zd", "extort", "--s", "0.5", "--phi", "0.2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("p=(0.9, 0.3, 0.5, 0)"), "{out}");
    assert!(out.contains("feasible: true"));
    assert!(out.contains("slope 0.5"), "{out}");

    let o = zd(&["zd", "extort", "--s", "0.5", "--phi", "0.5"]);
    assert!(
        stderr(&o).contains("phi <= 1/(s(c - r/2) + r/2)"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn payoff_wsls_against_alld() {
    let o = zd(&["payoff", "--x", "wsls", "--y", "alld", "--seed", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("analytic: (-0.5000, 1.5000)"), "{out}");
    assert!(out.contains("simulated:"), "{out}");
}

#[test]
fn figure_four_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = zd(&[
        "figure", "--id", "4", "--seed", "7", "--n", "2000", "--out", &out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("collinear: true, s_Y = 0.5000 ± 1e-9"),
        "{}",
        stdout(&o)
    );
    let csv = std::fs::read_to_string(dir.path().join("cloud.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2001);
    assert!(csv.starts_with("index,q1,q2,q3,q4,sx,sy,degenerate,method\n"));
    let svg = std::fs::read_to_string(dir.path().join("cloud.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.json");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        &format!(
            "{{\"strategy\": \"wsls\", \"n_opponents\": 50, \"seed\": 1, \"out_dir\": {:?}}}",
            out.display().to_string()
        ),
    );
    let o = zd(&["cloud", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let from_file = std::fs::read_to_string(out.join("cloud.csv")).unwrap();
    assert_eq!(from_file.lines().count(), 51);

    let o = zd(&["cloud", "--config", &cfg, "--n", "20", "--seed", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let overridden = std::fs::read_to_string(out.join("cloud.csv")).unwrap();
    assert_eq!(overridden.lines().count(), 21);

    // a flag strategy replaces the file's strategy rather than conflicting with it
    let o = zd(&[
        "cloud",
        "--config",
        &cfg,
        "--strategy",
        "zd-set",
        "--p1",
        "0.8",
        "--p4",
        "0.1",
        "--n",
        "10",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn conflicting_payoff_blocks_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "{\"strategy\": \"wsls\", \"rstp\": {\"R\": 3, \"S\": 0, \"T\": 5, \"P\": 1}, \"rc\": {\"r\": 6, \"c\": 4}}",
    );
    let o = zd(&["cloud", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("rstp") && err.contains("rc"), "{err}");
}
