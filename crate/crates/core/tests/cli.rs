use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use cenrisk::cli::RunManifest;
use cenrisk::ingest::read_dataset;
use cenrisk::sampler::chain_from_csv;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cenrisk"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn follic() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data/follic.txt")
        .display()
        .to_string()
}

fn manifest(dir: &Path) -> RunManifest {
    serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap()
}

fn p(dir: &Path) -> &str {
    dir.to_str().unwrap()
}

#[test]
fn simulate_scheme_one_to_stdout() {
    let out = run(&["simulate", "--scheme", "1", "--seed", "42"]);
    assert!(out.status.success());
    let data = read_dataset(out.stdout.as_slice()).unwrap();
    assert_eq!(data.n(), 200);
    assert_eq!(data.m(), 200);
    assert_eq!(data.total_removed(), 0);
}

#[test]
fn simulate_is_byte_reproducible_and_writes_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        assert!(
            run(&["simulate", "--scheme", "2", "--seed", "42", "--out", p(d)])
                .status
                .success()
        );
    }
    assert_eq!(
        fs::read(a.join("data.csv")).unwrap(),
        fs::read(b.join("data.csv")).unwrap()
    );
    let data = read_dataset(fs::read(a.join("data.csv")).unwrap().as_slice()).unwrap();
    assert_eq!((data.n(), data.m()), (200, 160));
    let m = manifest(&a);
    assert_eq!(m.command, "simulate");
    assert_eq!(m.seeds, vec![42]);
    assert_eq!(m.outputs, vec!["data.csv"]);
}

#[test]
fn unknown_scheme_lists_valid_ones() {
    let out = run(&["simulate", "--scheme", "9"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("1, 2, 3, 4"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["fit"]).status.code(), Some(2));
    assert_eq!(run(&["ingest", "x", "--case", "3"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn simulate_from_spec_file() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = serde_json::json!({
        "name": "small",
        "params": { "lambda1": 0.8, "lambda2": 0.4, "alpha": 1.0, "beta": 1.2 },
        "scheme": { "n": 30, "removals": [2, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 7] },
        "cause_mode": "BernoulliHalf",
        "seed": 3
    });
    let path = tmp.path().join("spec.json");
    fs::write(&path, spec.to_string()).unwrap();
    let out_dir = tmp.path().join("sim");
    let out = run(&["simulate", "--spec", p(&path), "--out", p(&out_dir)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let data = read_dataset(fs::read(out_dir.join("data.csv")).unwrap().as_slice()).unwrap();
    assert_eq!((data.n(), data.m(), data.total_removed()), (30, 20, 10));
    assert_eq!(data.records()[0].removed, 2);
    assert!(manifest(&out_dir).input.is_some());
}

#[test]
fn fit_writes_chain_summary_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    assert!(
        run(&["simulate", "--scheme", "1", "--seed", "5", "--out", p(&sim)])
            .status
            .success()
    );
    let fit = tmp.path().join("fit");
    let data = sim.join("data.csv");
    let out = run(&[
        "fit",
        p(&data),
        "--iterations",
        "600",
        "--gamma",
        "0.1",
        "--seed",
        "3",
        "--out",
        p(&fit),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let draws = chain_from_csv(fs::read(fit.join("chain.csv")).unwrap().as_slice()).unwrap();
    assert_eq!(draws.len(), 480);
    let jsonl = fs::read_to_string(fit.join("summary.jsonl")).unwrap();
    let records: Vec<Value> = jsonl
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 4);
    let names: Vec<&str> = records
        .iter()
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["lambda1", "lambda2", "alpha", "beta"]);
    for r in &records {
        assert_eq!(r["gamma"].as_f64(), Some(0.1));
        assert!(r["hpd_lower"].as_f64().unwrap() < r["hpd_upper"].as_f64().unwrap());
    }
    assert!(fs::read_to_string(fit.join("summary.txt"))
        .unwrap()
        .contains("hpd90_lo"));

    let m = manifest(&fit);
    assert_eq!(m.command, "fit");
    assert_eq!(m.seeds, vec![3]);
    let digest = cenrisk::cli::sha256_hex(&fs::read(&data).unwrap());
    assert_eq!(m.input.as_ref().unwrap().sha256, digest);
    assert!(m.outputs.contains(&"chain.csv".to_string()));
}

#[test]
fn fit_without_out_streams_the_chain() {
    let sim = run(&["simulate", "--scheme", "3", "--seed", "8"]);
    let out = run_stdin(
        &["fit", "-", "--iterations", "200", "--burn-in", "50"],
        &sim.stdout,
    );
    assert!(out.status.success());
    assert_eq!(chain_from_csv(out.stdout.as_slice()).unwrap().len(), 150);
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda1"));
}

#[test]
fn several_chains_and_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = run(&["simulate", "--scheme", "1", "--seed", "6"]);
    let data = tmp.path().join("data.csv");
    fs::write(&data, &sim.stdout).unwrap();
    let cfg = tmp.path().join("fit.cfg");
    fs::write(
        &cfg,
        "# short run\niterations = 400\nburn-in = 100\nthin = 2\nseeds = 1, 2, 3\n",
    )
    .unwrap();
    let fit = tmp.path().join("fit");
    let out = run(&[
        "fit",
        p(&data),
        "--config",
        p(&cfg),
        "--iterations",
        "300",
        "--out",
        p(&fit),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut lens = Vec::new();
    for k in 1..=3 {
        let c = chain_from_csv(
            fs::read(fit.join(format!("chain_{k}.csv")))
                .unwrap()
                .as_slice(),
        )
        .unwrap();
        lens.push(c.len());
    }
    // flag wins over the file: (300 - 100) / 2
    assert_eq!(lens, vec![100; 3]);
    assert_ne!(
        fs::read(fit.join("chain_1.csv")).unwrap(),
        fs::read(fit.join("chain_2.csv")).unwrap()
    );
    assert!(fs::read_to_string(fit.join("summary.txt"))
        .unwrap()
        .contains("draws: 300"));
    assert_eq!(manifest(&fit).seeds, vec![1, 2, 3]);

    let bad = tmp.path().join("bad.cfg");
    fs::write(&bad, "iterations = lots\n").unwrap();
    assert_eq!(
        run(&["fit", p(&data), "--config", p(&bad)]).status.code(),
        Some(2)
    );
}

#[test]
fn single_cause_data_is_a_data_error() {
    let text = "# n=3\ntime,cause,removed\n0.1,1,0\n0.2,1,0\n0.3,1,0\n";
    let out = run_stdin(&["fit", "-", "--iterations", "50"], text.as_bytes());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("prior degenerate"));
}

#[test]
fn rerun_reproduces_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("fit.cfg");
    fs::write(&cfg, "iterations = 300\nseed = 12\nwidth = 0.5\n").unwrap();
    let sim = run(&["simulate", "--scheme", "4", "--seed", "1"]);
    let data = tmp.path().join("data.csv");
    fs::write(&data, &sim.stdout).unwrap();
    let first = tmp.path().join("first");
    assert!(
        run(&["fit", p(&data), "--config", p(&cfg), "--out", p(&first)])
            .status
            .success()
    );
    // The config file is not needed any more.
    fs::remove_file(&cfg).unwrap();
    let second = tmp.path().join("second");
    let out = run(&[
        "rerun",
        p(&first.join("manifest.json")),
        "--out",
        p(&second),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for f in ["chain.csv", "summary.txt", "summary.jsonl"] {
        assert_eq!(
            fs::read(first.join(f)).unwrap(),
            fs::read(second.join(f)).unwrap(),
            "{f}"
        );
    }
    assert_eq!(manifest(&first).args, manifest(&second).args);

    fs::write(&data, "# n=1\ntime,cause,removed\n1,1,0\n").unwrap();
    let third = tmp.path().join("third");
    let out = run(&["rerun", p(&first.join("manifest.json")), "--out", p(&third)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("digest"));
}

#[test]
fn ingest_cases() {
    let tmp = tempfile::tempdir().unwrap();
    let one = tmp.path().join("one");
    assert!(run(&["ingest", &follic(), "--case", "1", "--out", p(&one)])
        .status
        .success());
    let d1 = read_dataset(fs::read(one.join("data.csv")).unwrap().as_slice()).unwrap();
    assert_eq!((d1.m(), d1.total_removed(), d1.m1()), (348, 0, 272));

    let out = run(&["ingest", &follic(), "--case", "2"]);
    assert!(out.status.success());
    let d2 = read_dataset(out.stdout.as_slice()).unwrap();
    assert_eq!((d2.n(), d2.m(), d2.total_removed()), (541, 348, 193));
    assert_eq!(manifest(&one).config["cause_counts"]["disease"], 272);
}

#[test]
fn ingest_missing_column_names_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.txt");
    fs::write(&path, "# exported\nstnum resp relsite stat\n1 CR B 0\n").unwrap();
    let out = run(&["ingest", p(&path), "--case", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("dftime"), "{err}");
}

#[test]
fn plot_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let chain = tmp.path().join("chain.csv");
    let mut text = String::from("lambda1,lambda2,alpha,beta\n");
    for i in 0..300 {
        let x = 1.0 + (i as f64 * 0.618).fract();
        text.push_str(&format!("{x},{},{},0.5\n", x / 2.0, 10.0 * x * x));
    }
    fs::write(&chain, text).unwrap();
    let out_dir = tmp.path().join("plots");
    let out = run(&["plot", p(&chain), "--out", p(&out_dir)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut csv = 0;
    let mut svg = 0;
    for e in fs::read_dir(&out_dir).unwrap() {
        let name = e.unwrap().file_name().into_string().unwrap();
        if name.ends_with(".csv") {
            csv += 1;
        } else if name.ends_with(".svg") {
            svg += 1;
        }
    }
    assert_eq!((csv, svg), (8, 8));
    for name in ["lambda1", "lambda2", "alpha", "beta"] {
        let hist = fs::read_to_string(out_dir.join(format!("hist_{name}.csv"))).unwrap();
        let counts: Vec<u64> = hist
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(counts.iter().sum::<u64>(), 300, "{name}");
        if name == "beta" {
            assert_eq!(counts, vec![300]);
        }
        let trace = fs::read_to_string(out_dir.join(format!("trace_{name}.csv"))).unwrap();
        assert_eq!(trace.lines().count(), 301);
    }
    assert_eq!(manifest(&out_dir).outputs.len(), 16);
}

#[test]
fn plot_rejects_empty_chain() {
    let tmp = tempfile::tempdir().unwrap();
    let chain = tmp.path().join("chain.csv");
    fs::write(&chain, "lambda1,lambda2,alpha,beta\n").unwrap();
    let out = run(&["plot", p(&chain), "--out", p(&tmp.path().join("p"))]);
    assert_eq!(out.status.code(), Some(3));
}
