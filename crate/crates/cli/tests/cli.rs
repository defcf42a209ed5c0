use std::path::Path;
use std::process::Command;

fn risac(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_risac")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.conf");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn writes_all_outputs_and_respects_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m_ris = 16\nalgo = sre\ntrials = 50\n");
    let out = dir.path().join("out");
    let o = risac(&[
        "run",
        "--config",
        &cfg,
        "--algo",
        "all",
        "--sweep",
        "ris-size",
        "--grid",
        "8,16",
        "--trials",
        "2",
        "--seed",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["results.csv", "summary.csv", "manifest.txt", "timing.csv"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let results = std::fs::read_to_string(out.join("results.csv")).unwrap();
    // header + 3 schemes x 2 sizes x 2 trials
    assert_eq!(results.lines().count(), 13);
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("base_seed = 4"));
    assert!(manifest.contains("trials = 2"));
}

#[test]
fn identical_runs_give_identical_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "m_ris = 16\nsweep = gamma0\ngrid = 0, 10\ntrials = 3\nseed = 8\n",
    );
    let mut bytes = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("o{k}"));
        assert!(risac(&["run", "--config", &cfg, "--out", out.to_str().unwrap()])
            .status
            .success());
        bytes.push(std::fs::read(out.join("results.csv")).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let missing = dir.path().join("nope.conf");
    assert_eq!(
        risac(&["run", "--config", missing.to_str().unwrap(), "--out", out])
            .status
            .code(),
        Some(1)
    );

    let bad = write_config(dir.path(), "trials = 0\n");
    assert_eq!(risac(&["run", "--config", &bad, "--out", out]).status.code(), Some(1));
    assert_eq!(
        risac(&["run", "--config", &bad, "--trials", "1", "--algo", "best", "--out", out])
            .status
            .code(),
        Some(1)
    );

    let hopeless = write_config(dir.path(), "m_ris = 8\ngamma0_db = 60\ntrials = 2\n");
    let o = risac(&["run", "--config", &hopeless, "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    let results = std::fs::read_to_string(dir.path().join("out/results.csv")).unwrap();
    assert_eq!(results.lines().count(), 7);
}
