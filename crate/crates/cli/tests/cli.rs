use std::collections::HashMap;
use std::process::{Command, Output};

fn nemi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nemi")).args(args).env_remove("NEMI_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn sample_args(cmd: &str) -> Vec<&str> {
    match cmd {
        "constants" => vec!["constants", "--d", "3"],
        "limits" => vec!["limits"],
        "curve" => vec!["curve", "--points", "5"],
        "verify" => vec!["verify", "--dist", "rademacher_basis", "--d", "4", "--n", "4", "--reps", "100"],
        "lemma" => vec!["lemma", "--r", "3", "--trials", "50"],
        "tails" => vec!["tails", "--z-max", "0.5"],
        "cd" => vec!["cd", "--d", "5"],
        other => panic!("unknown command {other}"),
    }
}

#[test]
fn csv_headers_match_golden() {
    let text = golden("headers.txt");
    let headers: HashMap<&str, &str> = text.lines().filter_map(|l| l.split_once(' ')).collect();
    assert_eq!(headers.len(), 7);
    for (cmd, header) in headers {
        let o = nemi(&sample_args(cmd));
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stdout(&o).lines().next().unwrap(), header, "{cmd}");
    }
}

#[test]
fn deterministic_tables_match_golden() {
    assert_eq!(stdout(&nemi(&["constants", "--d", "3"])), golden("constants_d3.csv"));
    assert_eq!(stdout(&nemi(&["limits"])), golden("limits.csv"));
}

#[test]
fn constants_filter_and_formats() {
    let o = nemi(&["constants", "--d", "1000", "--case", "centered"]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 5);
    assert!(out.lines().skip(1).all(|l| l.split(',').nth(1) == Some("centered")));
    assert!(!out.contains('\r'));

    let json = stdout(&nemi(&["constants", "--d", "3", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["kind"], "constants_table");
    assert_eq!(v["metadata"]["tool_version"], env!("CARGO_PKG_VERSION"));
    let csv = golden("constants_d3.csv");
    for (row, line) in v["rows"].as_array().unwrap().iter().zip(csv.lines().skip(1)) {
        let k: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(row["k"].as_f64().unwrap(), k);
    }

    let table = stdout(&nemi(&["constants", "--d", "3", "--format", "table"]));
    assert!(table.lines().nth(1).unwrap().starts_with("--------"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let o = nemi(&["curve", "--d-min", "10", "--d-max", "1000", "--points", "2", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(2).unwrap().starts_with("1000,"));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["bogus"],
        vec!["constants"],
        vec!["constants", "--d", "2"],
        vec!["constants", "--d", "3", "--format", "xml"],
        vec!["constants", "--d", "3", "--case", "skewed"],
        vec!["curve", "--d-min", "2"],
        vec!["curve", "--d-min", "100", "--d-max", "10"],
        vec!["curve", "--points", "1"],
        vec!["verify", "--dist", "rademacher_basis", "--d", "4", "--n", "4", "--reps", "0"],
        vec!["verify", "--dist", "asym_bernoulli", "--d", "4", "--n", "4"],
        vec!["verify", "--dist", "asym_bernoulli", "--p", "0.7", "--d", "4", "--n", "4", "--case", "symmetric"],
        vec!["verify", "--dist", "nope", "--d", "4", "--n", "4"],
        vec!["verify", "--dist", "uniform_hypercube", "--d", "4", "--n", "4", "--r", "0.5"],
        vec!["lemma", "--r", "1.5"],
        vec!["lemma", "--r", "inf"],
        vec!["tails", "--step", "0"],
        vec!["tails", "--z-min", "-2"],
        vec!["cd", "--d", "0"],
    ] {
        let o = nemi(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty(), "{args:?}");
    }
    assert_eq!(nemi(&["--help"]).status.code(), Some(0));
    assert_eq!(nemi(&["--version"]).status.code(), Some(0));
}

#[test]
fn verify_passes_on_extremal_example() {
    let o = nemi(&["verify", "--dist", "rademacher_basis", "--d", "4", "--n", "4", "--reps", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let exact: Vec<&str> = out.lines().filter(|l| l.starts_with("exact,")).collect();
    assert_eq!(exact.len(), 5);
    assert!(exact.iter().all(|l| l.split(',').nth(3) == Some("0.25") && l.ends_with(",true")));
}

#[test]
fn verify_reads_vectors_from_file_or_inline() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.txt");
    std::fs::write(&path, "# two vectors\n1 0 1\n0 1 -1\n").unwrap();
    let arg = format!("@{}", path.display());
    let o = nemi(&["verify", "--dist", "fixed_vectors", "--vectors", &arg, "--case", "symmetric"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let inline = nemi(&["verify", "--dist", "fixed_vectors", "--vectors", "1,0,1;0,1,-1", "--case", "symmetric"]);
    assert_eq!(stdout(&o), stdout(&inline));
    let bad = nemi(&["verify", "--dist", "fixed_vectors", "--vectors", "1,0;0,1", "--d", "3"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn verify_is_reproducible_and_seeded_from_env() {
    let args = ["verify", "--dist", "uniform_hypercube", "--d", "10", "--n", "30", "--reps", "5000", "--seed", "9"];
    let a = stdout(&nemi(&args));
    let b = stdout(&nemi(&args));
    assert_eq!(a, b);
    let env =
        Command::new(env!("CARGO_BIN_EXE_nemi")).args(&args[..args.len() - 2]).env("NEMI_SEED", "9").output().unwrap();
    assert_eq!(stdout(&env), a);
    let other = stdout(&nemi(&[
        "verify",
        "--dist",
        "uniform_hypercube",
        "--d",
        "10",
        "--n",
        "30",
        "--reps",
        "5000",
        "--seed",
        "10",
    ]));
    assert_ne!(other, a);
}

#[test]
fn lemma_tails_and_cd_pass() {
    let o = nemi(&["lemma", "--r", "2", "--trials", "2000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("max_abs_upper_slack_scaled"));

    let o = nemi(&["tails"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 801);

    let o = nemi(&["cd", "--d", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert!((row[1].parse::<f64>().unwrap() - 1.63662).abs() < 1e-5);
    assert_eq!(row[4], "");
    assert!(!row[6].is_empty());
    let one = stdout(&nemi(&["cd", "--d", "1"]));
    let exact: f64 = one.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((exact - 1.0).abs() <= 1e-9);
}

#[test]
fn curve_is_ordered_at_every_point() {
    let o = nemi(&["curve"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut prev_d = 0;
    for line in out.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let d = v[0] as u64;
        assert!(d > prev_d);
        prev_d = d;
        if d >= 32 {
            assert!(v[1] < v[2] && v[2] < v[4] && v[3] < v[4], "{line}");
        }
    }
    assert_eq!(prev_d, 10_000_000);
}
