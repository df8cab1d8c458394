// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const TICKFLIP: &str = "module tickflip\ninput a\nreg t next=NOT(t)\nreg o next=XOR(a,t)\noutput y = o\n";
const DOS: &str = "module dos\ninput a\nreg o next=a\nreg c0 next=NOT(c0)\noutput y = o\n";
const ACCUMULATOR: &str = "module acc\ninput a\nreg x next=a\nreg acc next=XOR(acc, x)\noutput y = acc\n";
const CHAIN_AAG: &str = "aag 3 1 2 1 0\n2\n4 2\n6 4\n6\ni0 a\nl0 s0\nl1 s1\no0 y\n";

fn miterscan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_miterscan")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn detect_tickflip_reports_init_and_writes_vcd() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "tickflip.snl", TICKFLIP);
    let report = dir.path().join("report.json");
    let vcd_dir = dir.path().join("waves");
    let o = miterscan(&["detect", &file, "--report", report.to_str().unwrap(), "--vcd-dir", vcd_dir.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&report);
    assert_eq!(r["verdict"]["kind"], "cex");
    assert_eq!(r["verdict"]["property"], "init_property");
    assert_eq!(r["input"]["sha256"].as_str().unwrap().len(), 64);
    let vcd = fs::read_to_string(vcd_dir.join("tickflip.init_property.vcd")).unwrap();
    assert!(vcd.contains("$scope module instance1 $end"));
}

#[test]
fn detect_dos_lists_uncovered_counter() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "dos.snl", DOS);
    let report = dir.path().join("r.json");
    let o = miterscan(&["detect", &file, "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&report)["verdict"]["uncovered"], serde_json::json!(["c0"]));
    assert_eq!(code(&miterscan(&["coverage", &file])), 2);
}

#[test]
fn reports_differ_only_in_timings() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "tickflip.snl", TICKFLIP);
    let strip = |v: &mut serde_json::Value| {
        fn walk(v: &mut serde_json::Value) {
            match v {
                serde_json::Value::Object(m) => {
                    m.remove("elapsed_ms");
                    m.values_mut().for_each(walk);
                }
                serde_json::Value::Array(a) => a.iter_mut().for_each(walk),
                _ => {}
            }
        }
        walk(v);
    };
    let mut runs = Vec::new();
    for k in 0..2 {
        let report = dir.path().join(format!("r{k}.json"));
        miterscan(&["detect", &file, "--jobs", "2", "--report", report.to_str().unwrap()]);
        let mut v = json(&report);
        strip(&mut v);
        runs.push(v);
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn assume_equal_file_resolves_accumulator() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "acc.snl", ACCUMULATOR);
    assert_eq!(code(&miterscan(&["detect", &file])), 1);
    let list = write(dir.path(), "benign.txt", "# accumulator state\nacc\n");
    assert_eq!(code(&miterscan(&["detect", &file, "--assume-equal", &list])), 0);
}

#[test]
fn generated_benchmark_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.snl");
    let o = miterscan(&[
        "gen", "--rounds", "2", "--width", "4", "--trigger", "cycle:4", "--payload", "flip:1", "--seed", "7", "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = json(&dir.path().join("bench.manifest.json"));
    assert_eq!(manifest["reset"], "rst");
    let file = out.to_str().unwrap();
    assert_eq!(code(&miterscan(&["detect", file, "--reset", "rst=0"])), 1);
    assert_eq!(code(&miterscan(&["aggregate", file, "--reset", "rst=0"])), 1);
}

#[test]
fn detached_dos_is_uncovered_in_paper_literal_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("host.snl");
    let o = miterscan(&[
        "gen", "--rounds", "1", "--width", "4", "--trigger", "cycle:3", "--payload", "dos:2", "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&miterscan(&["detect", out.to_str().unwrap(), "--paper-literal", "--reset", "rst=0"])), 2);
}

#[test]
fn sim_prints_outputs_and_writes_vcd() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "chain.aag", CHAIN_AAG);
    let stim = write(dir.path(), "in.txt", "a=1\na=0\n");
    let vcd = dir.path().join("t.vcd");
    let o = miterscan(&["sim", &file, "--inputs", &stim, "--cycles", "3", "--vcd", vcd.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let lines: Vec<String> = String::from_utf8_lossy(&o.stdout).lines().map(|l| l.split_whitespace().collect::<Vec<_>>().join(" ")).collect();
    assert_eq!(lines, ["1 y=0", "2 y=1", "3 y=0"]);
    assert!(fs::read_to_string(vcd).unwrap().contains("$var wire 1"));
}

#[test]
fn crosscheck_campaign_is_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("x.json");
    let o = miterscan(&["crosscheck", "--seeds", "200", "--registers", "8", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = json(&report);
    assert_eq!(r["checked"], 200);
    assert_eq!(r["inconsistent"], serde_json::json!([]));
}

#[test]
fn usage_and_input_errors_exit_3() {
    assert_eq!(code(&miterscan(&["detect"])), 3);
    assert_eq!(code(&miterscan(&["frobnicate"])), 3);
    assert_eq!(code(&miterscan(&["detect", "/nonexistent/file.snl"])), 3);
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "bad.snl", "module bad\nreg r next=nope\n");
    let o = miterscan(&["detect", &file]);
    assert_eq!(code(&o), 3);
    assert!(!o.stderr.is_empty());
    let ok = write(dir.path(), "t.snl", TICKFLIP);
    assert_eq!(code(&miterscan(&["detect", &ok, "--reset", "y=0"])), 3);
    assert_eq!(code(&miterscan(&["detect", &ok, "--reset", "a"])), 3);
}
