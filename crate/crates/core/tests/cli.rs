use std::process::Command;

use seqelim::harness::{read_json, CSV_HEADER};

fn seqelim() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_seqelim"));
    cmd.env_remove("SEQELIM_SEED");
    cmd
}

fn stdout_of(cmd: &mut Command) -> (i32, String, String) {
    let out = cmd.output().expect("spawn seqelim");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn golden_csv_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let (code, _, err) = stdout_of(seqelim().args([
        "run", "--means", "0.7,0.6,0.5", "-T", "40", "--runs", "30", "--seed", "3", "--alg", "succrej",
        "--alg", "nseqel:p=2",
    ])
    .arg("--out")
    .arg(&path));
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "setup,K,T,runs,alg,params,errors,freq,ci_half,seed");
    assert_eq!(CSV_HEADER.join(","), "setup,K,T,runs,alg,params,errors,freq,ci_half,seed");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("custom,3,40,30,succrej,,"));
    assert!(rows[1].starts_with("custom,3,40,30,nseqel,p=2,"));
    assert!(rows[1].ends_with(",3"));
}

#[test]
fn bench_writes_nine_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bench.csv");
    let (code, stdout, err) = stdout_of(
        seqelim()
            .args(["bench", "--setup", "1", "--k", "40", "--seed", "7", "--runs", "20"])
            .arg("--out")
            .arg(&path),
    );
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("setup1 K=40 T=3900 runs=20 seed=7"), "{stdout}");
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn json_round_trip_reproduces_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let (code, first, err) = stdout_of(
        seqelim()
            .args(["run", "--setup", "geo7", "--runs", "50", "--seed", "11", "--format", "json"])
            .arg("--out")
            .arg(&path),
    );
    assert_eq!(code, 0, "{err}");
    let reports = read_json(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].num_arms, 7);

    let (code, second, err) = stdout_of(seqelim().args(["report", "--in"]).arg(&path));
    assert_eq!(code, 0, "{err}");
    let table = first.split("wrote ").next().unwrap();
    assert_eq!(table, second);
}

#[test]
fn seed_from_environment() {
    let run = |seed_env: Option<&str>, flag: Option<&str>| {
        let mut cmd = seqelim();
        cmd.args(["run", "--means", "0.6,0.5,0.5", "-T", "30", "--runs", "200", "--alg", "succrej", "--out", "-"]);
        if let Some(s) = seed_env {
            cmd.env("SEQELIM_SEED", s);
        }
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        stdout_of(&mut cmd).1
    };
    let by_env = run(Some("99"), None);
    assert!(by_env.trim_end().ends_with(",99"), "{by_env}");
    assert_eq!(by_env, run(None, Some("99")));
    let overridden = run(Some("99"), Some("5"));
    assert!(overridden.trim_end().ends_with(",5"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        "means = [0.7, 0.5, 0.4]\nbudget = 30\nruns = 40\nseed = 1\nalg = [\"seqhalv\"]\n",
    )
    .unwrap();
    let (code, out, err) = stdout_of(seqelim().args(["run", "--runs", "25", "--out", "-", "--config"]).arg(&cfg));
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("custom,3,30,25,seqhalv,,"), "{out}");

    std::fs::write(&cfg, "colour = 3\n").unwrap();
    let (code, ..) = stdout_of(seqelim().args(["run", "--config"]).arg(&cfg));
    assert_eq!(code, 2);
}

#[test]
fn exit_codes() {
    assert_eq!(stdout_of(seqelim().args(["bench"])).0, 2);
    assert_eq!(stdout_of(seqelim().args(["run", "--setup", "1", "--means", "0.5,0.4"])).0, 2);
    assert_eq!(stdout_of(seqelim().args(["run", "--means", "0.5,0.5"])).0, 2);
    let (code, _, err) = stdout_of(seqelim().args(["run", "--means", "0.7,0.6", "-T", "2", "--out", "/nonexistent/dir/x.csv", "--runs", "5"]));
    assert_eq!(code, 3, "{err}");
    let (code, ..) = stdout_of(seqelim().args(["oracle", "--setup", "1", "--alg", "succrej"]));
    assert_eq!(code, 3);
    assert_eq!(stdout_of(seqelim().args(["--help"])).0, 0);
}

#[test]
fn bound_table() {
    let (code, out, err) = stdout_of(seqelim().args(["bound", "--setup", "1", "--k", "40"]));
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("H1 = 3900.0000"));
    let seqhalv = out.lines().find(|l| l.starts_with("seqhalv")).unwrap();
    assert!(seqhalv.contains("15.9658"), "{seqhalv}");
}

#[test]
fn advise_and_block() {
    let (code, out, _) = stdout_of(seqelim().args(["advise-p", "--k", "120", "--gamma", "0.3"]));
    assert_eq!(code, 0);
    assert!(out.contains("interpolated range (0.53, 2.00]"), "{out}");

    let (code, out, err) = stdout_of(seqelim().args([
        "block", "--means", "0.7,0.5,0.6,0.2", "--blocks", "2x2", "-T", "60", "--runs", "40", "--out", "-",
    ]));
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("M = 2 blocks"));
    assert!(out.contains("custom,4,60,40,block,blocks=2x2;p=1,"), "{out}");
}
