use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn distimate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_distimate"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn replay_writes_expected_files() {
    let dir = scratch("replay");
    let out = dir.join("out");
    let o = distimate(&[
        "replay",
        "--input",
        &data("device_counts_2.csv"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("replay.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("kind,c00,c11,c10,c01,total,p_hat,std_err,omega_hat,clamped")
    );
    assert_eq!(lines.count(), 3);
    assert!(!csv.contains('\r'));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["kind"], "replay");
    assert!(summary["metrics"]["p_hat"]["p_a"].as_f64().unwrap() > 0.3);
}

#[test]
fn malformed_replay_files_exit_2() {
    let dir = scratch("malformed");
    let cases = [
        (
            "sum.csv",
            "kind,c00,c11,c10,c01,total\na,1,1,1,1,5\nb,1,1,1,1,4\nc,1,1,1,1,4\n",
        ),
        ("missing.csv", "kind,c00,c11,c10,c01,total\na,1,1,1,1,4\nb,1,1,1,1,4\n"),
        (
            "repeat.csv",
            "kind,c00,c11,c10,c01,total\na,1,1,1,1,4\na,1,1,1,1,4\nc,1,1,1,1,4\n",
        ),
        (
            "header.csv",
            "kind,n00,c11,c10,c01,total\na,1,1,1,1,4\nb,1,1,1,1,4\nc,1,1,1,1,4\n",
        ),
        (
            "text.csv",
            "kind,c00,c11,c10,c01,total\na,x,1,1,1,4\nb,1,1,1,1,4\nc,1,1,1,1,4\n",
        ),
        (
            "zero.csv",
            "kind,c00,c11,c10,c01,total\na,0,0,0,0,0\nb,1,1,1,1,4\nc,1,1,1,1,4\n",
        ),
    ];
    for (name, body) in cases {
        let path = dir.join(name);
        fs::write(&path, body).unwrap();
        let o = distimate(&[
            "replay",
            "--input",
            path.to_str().unwrap(),
            "--out",
            dir.join("o").to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 2, "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn config_errors_exit_1() {
    let dir = scratch("config");
    let out = dir.join("o");
    let out = out.to_str().unwrap();
    assert_eq!(code(&distimate(&["bd-sweep", "--shots", "0", "--out", out])), 1);
    assert_eq!(code(&distimate(&["replay", "--out", out])), 1);
    assert_eq!(code(&distimate(&["mbqc-sweep", "--chain", "2", "--out", out])), 1);
    assert_eq!(
        code(&distimate(&["qst-compare", "--noise", "thermal:0.1", "--out", out])),
        1
    );
    assert_eq!(code(&distimate(&["no-such-command"])), 1);
    let cfg = dir.join("typo.toml");
    fs::write(&cfg, "shotz = 10\n").unwrap();
    assert_eq!(
        code(&distimate(&[
            "bd-sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out
        ])),
        1
    );
    let cfg = dir.join("other_kind.toml");
    fs::write(&cfg, "kind = \"track\"\n").unwrap();
    assert_eq!(
        code(&distimate(&[
            "bd-sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out
        ])),
        1
    );
    assert_eq!(code(&distimate(&["--help"])), 0);
}

#[test]
fn degenerate_posterior_exits_3() {
    let dir = scratch("degenerate");
    let cfg = dir.join("track.toml");
    // Every cell of this grid has rates summing above one.
    fs::write(
        &cfg,
        "kind = \"track\"\n[track]\nsteps = 3\ngrid-points = 3\ngrid-lo = 0.4\ngrid-hi = 0.9\n",
    )
    .unwrap();
    let o = distimate(&[
        "track",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.join("o").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_file_and_flags() {
    let dir = scratch("merge");
    let cfg = dir.join("bd.toml");
    fs::write(
        &cfg,
        "kind = \"bd-sweep\"\nshots = 2000\nseed = 1\n[sweep]\nq1-min = 0.8\nstep = 0.1\n",
    )
    .unwrap();
    let out = dir.join("o");
    let o = distimate(&[
        "bd-sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["shots"], 2000);
    assert_eq!(summary["config"]["seed"], 5);
    // q1 in {0.8, 0.9, 1.0} with q2 stepping by 0.1 up to 1 - q1: 3 + 2 + 1 rows.
    assert_eq!(summary["metrics"]["points"], 6);
    let rows = fs::read_to_string(out.join("bd_sweep.csv")).unwrap();
    assert_eq!(rows.lines().count(), 7);
    assert!(rows.starts_with("q1,q2,q3,q4,p_a,p_b,p_c,q1_raw,"));
}

#[test]
fn exact_werner_sweep_has_zero_distance_at_pure_state() {
    let dir = scratch("exact");
    let out = dir.join("o");
    let o = distimate(&["werner-sweep", "--exact", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(out.join("werner_sweep.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    let fields: Vec<&str> = last.split(',').collect();
    assert_eq!(fields[0], "1.0");
    // td_a, td_b, td_c
    for f in &fields[8..11] {
        assert_eq!(f.parse::<f64>().unwrap(), 0.0);
    }
}
