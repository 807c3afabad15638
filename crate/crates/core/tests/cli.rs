use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metacav")).args(args).output().expect("spawn metacav")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("metacav-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (header, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

#[test]
fn scatter_sweep_csv_and_json_agree() {
    let args = ["scatter-sweep", "--shape", "disk", "--radius", "1", "--eps", "-1.1", "--rho", "2", "--k", "0.5:8:239", "--trunc", "32"];
    let csv = bin(&args);
    assert!(csv.status.success(), "{}", String::from_utf8_lossy(&csv.stderr));
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("# metacav "));
    assert!(text.contains("# schema: 1"));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["k", "N", "is_local_max"]);
    assert_eq!(rows.len(), 239);

    let mut jargs = args.to_vec();
    jargs.extend(["--format", "json"]);
    let j: Value = serde_json::from_slice(&bin(&jargs).stdout).unwrap();
    assert_eq!(j["schema"], 1);
    assert_eq!(j["config"]["sweep"]["truncation"], 32);
    let jrows = j["rows"].as_array().unwrap();
    assert_eq!(jrows.len(), rows.len());
    for (r, jr) in rows.iter().zip(jrows) {
        for c in 0..2 {
            assert_eq!(r[c].parse::<f64>().unwrap(), jr[c].as_f64().unwrap());
        }
    }
}

#[test]
fn reruns_are_bit_identical() {
    let args = ["resonance-map", "--shape", "disk", "--eps", "-1.1", "--m-min", "0", "--m-max", "16"];
    let (a, b) = (bin(&args), bin(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let (header, rows) = csv_rows(std::str::from_utf8(&a.stdout).unwrap());
    let mi = header.iter().position(|h| h == "multiplicity").unwrap();
    for r in &rows {
        let want = if r[0] == "0" { "1" } else { "2" };
        assert_eq!(r[mi], want);
    }
    assert!(rows.iter().any(|r| r[0] == "0"));
}

#[test]
fn out_file_and_descriptor() {
    let desc = tmp("peanut.json");
    std::fs::write(&desc, r#"{"geometry": {"type": "peanut"}, "permittivity": {"type": "constant", "value": -1.1}, "grid": 256}"#).unwrap();
    let out = tmp("intervals.json");
    let o = bin(&[
        "intervals",
        "--descriptor",
        desc.to_str().unwrap(),
        "--m-min",
        "1",
        "--m-max",
        "12",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let j: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(j["rows"].as_array().unwrap().len(), 12);
    assert_eq!(j["metadata"]["grid"], 256);
    assert_eq!(j["metadata"]["lambda"].as_array().unwrap().len(), 3);
    assert_eq!(j["config"]["geometry"]["type"], "peanut");
}

#[test]
fn quasimode_reports_winding_number() {
    let o = bin(&["quasimode", "--shape", "peanut", "--eps", "-1.1", "--m", "12", "--ns", "16", "--nxi", "5", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let j: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["metadata"]["winding_number"], 12);
    assert_eq!(j["rows"].as_array().unwrap().len(), 80);
    assert_eq!(j["metadata"]["residuals"].as_array().unwrap().len(), 4);
}

#[test]
fn exit_codes() {
    // usage error
    assert_eq!(bin(&["scatter-sweep", "--bogus"]).status.code(), Some(2));
    // general geometry for the exact disk solver
    let o = bin(&["scatter-sweep", "--shape", "peanut", "--eps", "-1.1", "--k", "1:2:3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("intervals"));
    // wrong sign regime
    assert_eq!(bin(&["intervals", "--shape", "disk", "--eps", "-0.9"]).status.code(), Some(2));
    // positive permittivity
    assert_eq!(bin(&["resonance-map", "--shape", "disk", "--eps", "2", "--m-max", "2"]).status.code(), Some(2));
    assert_eq!(bin(&["intervals", "--descriptor", "/nonexistent/file.json"]).status.code(), Some(2));
    // unwritable output
    let o = bin(&["intervals", "--shape", "disk", "--eps", "-1.1", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(3));
}
