use std::path::Path;
use std::process::{Command, Output};

fn gne(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gne")).args(args).output().expect("run gne")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn gen_is_deterministic_and_parses() {
    let args = ["gen", "--model", "hamming", "--N", "200", "--alpha", "1", "--beta", "2", "--A", "2", "--d", "0.25", "--seed", "5"];
    let a = gne(&args);
    let b = gne(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("GNV1\nN=200 A=2 L="));
    let g = gne::io::read_gnv(text.as_bytes()).unwrap();
    assert_eq!(g.n(), 200);
}

#[test]
fn entropy_and_rate() {
    let e = json(&gne(&["entropy", "--model", "er_binary", "--N", "4", "--alpha", "2", "--exact"]));
    assert_eq!(e["bits"].as_f64().unwrap(), 6.0);
    let r = json(&gne(&["rate", "--model", "er_named", "--alpha", "1", "--beta", "2"]));
    assert_eq!(r["rate"].as_f64().unwrap(), 1.5);
    let o = json(&gne(&["rate", "--model", "hybrid", "--alpha", "1", "--beta", "2", "--A", "2"]));
    let u = json(&gne(&["rate", "--model", "hybrid", "--unordered", "--alpha", "1", "--beta", "2", "--A", "2"]));
    assert_eq!(u["rate"].as_f64().unwrap(), o["rate"].as_f64().unwrap() - 1.0);
    let t = json(&gne(&["entropy", "--model", "tree-uniform", "--N", "50"]));
    assert!((t["normalized_rate"].as_f64().unwrap() - 48.0 / 50.0).abs() < 1e-15);
}

#[test]
fn hybrid_entropy_needs_estimator() {
    let o = gne(&["entropy", "--model", "hybrid", "--N", "100", "--alpha", "1", "--beta", "2", "--A", "2", "--exact"]);
    assert_eq!(o.status.code(), Some(2));
    let est = json(&gne(&[
        "estimate", "--model", "hybrid", "--N", "300", "--alpha", "1", "--beta", "2", "--A", "2", "--link-samples", "4",
    ]));
    let (nats, se, series) = (
        est["nats"].as_f64().unwrap(),
        est["stderr"].as_f64().unwrap(),
        est["e_series_nats"].as_f64().unwrap(),
    );
    assert!(se > 0.0);
    assert!((nats - series).abs() < 0.05 * series);
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(dir.path(), "er.csv");
    let o = gne(&["sweep", "--model", "er_binary", "--alpha", "2", "--N-list", "1000,10000,100000", "--csv", &csv]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("model,params,size,n,seeds,root_seed,entropy_nats,normalized_rate,target_rate"));
    let sw = gne(&["sweep", "--model", "small_world", "--alpha", "1", "--gamma", "3", "--n-list", "11,21,31"]);
    assert_eq!(stdout(&sw).lines().count(), 4);
    let bad = gne(&["sweep", "--model", "tree_uniform", "--N-list", "100,10"]);
    assert_eq!(bad.status.code(), Some(2));
    let stderr = String::from_utf8(bad.stderr).unwrap();
    assert_eq!(stderr.trim_end().lines().count(), 1);
}

#[test]
fn encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (g, s, back) = (path(dir.path(), "g.gnv"), path(dir.path(), "g.gnc"), path(dir.path(), "back.gnv"));
    let model = ["--model", "er_named", "--N", "300", "--alpha", "1.5", "--beta", "2", "--A", "3"];
    let mut args = vec!["gen", "--seed", "9", "--out", &g];
    args.extend(model);
    assert!(gne(&args).status.success());
    let mut args = vec!["encode", "--in", &g, "--out", &s];
    args.extend(model);
    let report = json(&gne(&args));
    let bits = report["bits"].as_f64().unwrap();
    let ideal = report["ideal_bits"].as_f64().unwrap();
    let overhead = report["overhead_bits"].as_f64().unwrap();
    assert!(bits - ideal >= 0.0 && bits - ideal <= 64.0 + overhead);
    let mut args = vec!["decode", "--in", &s, "--out", &back];
    args.extend(model);
    assert!(gne(&args).status.success());
    assert_eq!(std::fs::read(&g).unwrap(), std::fs::read(&back).unwrap());

    let mut bytes = std::fs::read(&s).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 1;
    std::fs::write(&s, bytes).unwrap();
    let mut args = vec!["decode", "--in", &s, "--out", &back];
    args.extend(model);
    let o = gne(&args);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("checksum"));
}

#[test]
fn hybrid_unordered_gen_renames() {
    let o = gne(&["gen", "--model", "hybrid", "--unordered", "--N", "2000", "--alpha", "2", "--beta", "1.2", "--A", "2", "--seed", "1"]);
    assert!(o.status.success());
    let g = gne::io::read_gnv(o.stdout.as_slice()).unwrap();
    assert!(g.names_distinct());
    assert!(!g.is_ordered());
}

#[test]
fn extensions_and_dag_files() {
    let dir = tempfile::tempdir().unwrap();
    let dag = path(dir.path(), "fork.dag");
    std::fs::write(&dag, "2 0\n2 1\n").unwrap();
    let r = json(&gne(&["extensions", "--in", &dag]));
    assert_eq!(r["count"], "2");
    let big = path(dir.path(), "chain.dag");
    let chain: String = (1..30).map(|i| format!("{i} {}\n", i - 1)).collect();
    std::fs::write(&big, chain).unwrap();
    assert_eq!(gne(&["extensions", "--in", &big]).status.code(), Some(4));
    let cyclic = path(dir.path(), "cycle.dag");
    std::fs::write(&cyclic, "1 0\n0 1\n").unwrap();
    assert_eq!(gne(&["extensions", "--in", &cyclic]).status.code(), Some(2));
}

#[test]
fn diag_and_const() {
    let d = json(&gne(&["diag", "--model", "small_world", "--n", "51", "--alpha", "1", "--gamma", "3", "--edge-lengths", "--similarity"]));
    assert!(d["edge_lengths"]["random_edges"].as_u64().unwrap() > 0);
    assert!(d["similarity"]["per_edge_mean"].as_f64().is_some());
    let c = json(&gne(&["diag", "--model", "hybrid", "--N", "500", "--alpha", "1", "--beta", "2", "--A", "2", "--collisions"]));
    assert!(c["collisions"]["est_theta"].as_f64().unwrap() >= 0.0);
    let k = gne(&["const", "--A", "2", "--k-max", "1", "--gamma", "1", "--p", "0.5", "--x", "0.25"]);
    let text = stdout(&k);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], format!("h_A,2,0,{}", 2f64.ln()));
    assert!(lines[2].starts_with("kappa,1,0.28364816"));
    assert!(lines[3].starts_with("Lambda,0.5,0.25,"));
}

#[test]
fn error_exit_codes() {
    assert_eq!(gne(&["rate", "--model", "nope", "--alpha", "1"]).status.code(), Some(2));
    assert_eq!(gne(&["entropy", "--model", "er_binary", "--N", "100"]).status.code(), Some(2));
    let io = gne(&["decode", "--model", "er_binary", "--N", "4", "--alpha", "1", "--in", "/nonexistent/x.gnc", "--out", "/tmp/x"]);
    assert_eq!(io.status.code(), Some(3));
    let threads = Command::new(env!("CARGO_BIN_EXE_gne"))
        .args(["rate", "--model", "er_binary", "--alpha", "1"])
        .env("GNE_THREADS", "2")
        .output()
        .unwrap();
    assert!(threads.status.success());
}
