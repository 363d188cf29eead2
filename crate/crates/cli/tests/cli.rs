use std::path::Path;
use std::process::{Command, Output};

use smkm_core::io::InstanceFile;

fn smkm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smkm")).args(args).current_dir(dir).output().expect("spawn smkm")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV body, skipping the comment preamble and column row.
fn rows(text: &str) -> Vec<csv::StringRecord> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    csv::Reader::from_reader(body.as_bytes()).records().map(Result::unwrap).collect()
}

#[test]
fn gen_hidden_chain_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = smkm(
        dir.path(),
        &["gen", "--family", "hidden_chain", "--k", "3", "--m", "4", "--seed", "1", "--out", "a.json"],
    );
    assert!(out.status.success());
    let file = InstanceFile::load(&dir.path().join("a.json")).unwrap();
    assert_eq!(file.ground_size, 12);
    assert_eq!(file.matroids.len(), 3);
    assert_eq!(file.id, "hidden_chain-k3-m4-s1");
}

#[test]
fn gen_coordinate_streams_two_layers() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        smkm(dir.path(), &["gen", "--family", "coordinate", "--p", "3", "--m", "10", "--k", "40", "--out", "c.json"]);
    assert!(out.status.success());
    let file = InstanceFile::load(&dir.path().join("c.json")).unwrap();
    assert_eq!(file.stream_order.len(), 20);
}

#[test]
fn gen_to_stdout_matches_file_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for family in ["hidden_chain", "coordinate", "chain_family", "random_partition"] {
        let args = ["gen", "--family", family, "--k", "2", "--m", "3", "--p", "2", "--seed", "5"];
        let printed = smkm(dir.path(), &args);
        assert!(printed.status.success(), "{family}");
        let path = dir.path().join(format!("{family}.json"));
        let saved = smkm(dir.path(), &[&args[..], &["--out", path.to_str().unwrap()]].concat());
        assert!(saved.status.success());
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes, printed.stdout, "{family}");
        let again = dir.path().join("again.json");
        InstanceFile::load(&path).unwrap().save(&again).unwrap();
        assert_eq!(std::fs::read(&again).unwrap(), bytes, "{family}");
    }
}

#[test]
fn exact_run_has_unit_ratio() {
    let dir = tempfile::tempdir().unwrap();
    assert!(smkm(
        dir.path(),
        &["gen", "--family", "random_partition", "--n", "8", "--k", "2", "--seed", "3", "--out", "r.json"]
    )
    .status
    .success());
    let out = smkm(dir.path(), &["run", "--alg", "exact", "--instance", "r.json", "--no-timestamp"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("# smkm-run-csv v1\ninstance_id,alg,eps,"));
    let rows = rows(&text);
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][5], "1");
    assert_eq!(&rows[0][6], "true");
    assert_eq!(&rows[0][9], "");
}

#[test]
fn stream_run_appends_feasible_rows() {
    let dir = tempfile::tempdir().unwrap();
    for (i, objective) in ["coverage", "cut"].iter().enumerate() {
        let name = format!("r{i}.json");
        let args =
            ["gen", "--family", "random_partition", "--n", "9", "--k", "2", "--objective", objective, "--out", &name];
        assert!(smkm(dir.path(), &args).status.success());
    }
    for name in ["r0.json", "r1.json"] {
        let out = smkm(dir.path(), &["run", "--alg", "stream", "--instance", name, "--csv", "runs.csv"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let text = std::fs::read_to_string(dir.path().join("runs.csv")).unwrap();
    assert_eq!(text.matches("# smkm-run-csv v1").count(), 1);
    let rows = rows(&text);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| &r[6] == "true"));
}

#[test]
fn greedy_stays_small_on_hidden_chains() {
    let dir = tempfile::tempdir().unwrap();
    let mut paths = Vec::new();
    for seed in 0..20 {
        let name = format!("h{seed}.json");
        let args =
            ["gen", "--family", "hidden_chain", "--k", "5", "--m", "50", "--seed", &seed.to_string(), "--out", &name];
        assert!(smkm(dir.path(), &args).status.success());
        paths.push(name);
    }
    let mut args = vec!["run", "--alg", "greedy", "--no-timestamp", "--instance"];
    args.extend(paths.iter().map(String::as_str));
    let out = smkm(dir.path(), &args);
    assert!(out.status.success());
    let rows = rows(&stdout(&out));
    let mean = rows.iter().map(|r| r[3].parse::<f64>().unwrap()).sum::<f64>() / rows.len() as f64;
    assert!(mean <= 1.5, "mean greedy value {mean}");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["gen", "--family", "nope"],
        vec!["run", "--alg", "stream", "--eps", "0.05", "--instance", "x.json"],
        vec!["chain", "--protocol", "4"],
        vec!["bogus"],
    ] {
        assert_eq!(smkm(dir.path(), &args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn runtime_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = smkm(dir.path(), &["run", "--alg", "greedy", "--instance", "missing.json"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error: "));

    let args = ["gen", "--family", "random_partition", "--objective", "cut", "--out", "cut.json"];
    assert!(smkm(dir.path(), &args).status.success());
    let non_monotone = smkm(dir.path(), &["run", "--alg", "alg2", "--instance", "cut.json"]);
    assert_eq!(non_monotone.status.code(), Some(1));
}

#[test]
fn verify_suite_reports_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = smkm(dir.path(), &["verify", "--suite", "matroid-axioms"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().all(|l| l.starts_with("PASS ") || l.ends_with(" failed")));
    assert!(text.ends_with(", 0 failed\n"));
}

#[test]
fn chain_writes_summary_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = smkm(
        dir.path(),
        &[
            "chain",
            "--protocol",
            "1",
            "--inner",
            "greedy",
            "--case",
            "0",
            "--trials",
            "10",
            "--seed",
            "2024",
            "--csv",
            "c.csv",
        ],
    );
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("protocol 1: 10/10 correct"));
    let text = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(text.starts_with("# smkm-chain-csv v1\n# generated-at "));
    let rows = rows(&text);
    assert_eq!(rows.len(), 11);
    let summary = rows.last().unwrap();
    assert_eq!(&summary[1], "summary");
    assert_eq!(&summary[6], "1.0000");
}

#[test]
fn capped_inner_needs_protocol_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = smkm(dir.path(), &["chain", "--protocol", "1", "--inner", "capped", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(1));
}
