use std::process::{Command, Output};

use serde_json::Value;

fn packbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_packbound")).args(args).output().unwrap()
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn bound_json_records() {
    let out = packbound(&["bound", "--gen", "cycle:5", "--gen", "petersen", "--t", "2", "--format", "json", "--with-alpha"]);
    assert_eq!(out.status.code(), Some(0));
    let records = json_lines(&out);
    assert_eq!(records.len(), 2);
    for (r, alpha) in records.iter().zip([2.0, 4.0]) {
        assert_eq!(r["certified"], true);
        assert_eq!(r["alpha"], alpha);
        let certified = r["certified_bound"].as_f64().unwrap();
        assert!(certified >= alpha - 1e-6);
        assert!(r["gap"].as_f64().unwrap() <= 1e-6);
        assert_eq!(r["certificate_digest"].as_str().unwrap().len(), 64);
        for key in ["graph", "method", "level", "bound", "dual_bound", "status", "iterations", "verification_margin", "warnings", "wall_time"] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
    }
}

#[test]
fn jobs_preserve_order_and_values() {
    let args = ["bound", "--gen", "cycle:5", "--gen", "cycle:7", "--gen", "petersen", "--method", "theta-prime", "--format", "json"];
    let serial = json_lines(&packbound(&args));
    let parallel = json_lines(&packbound(&[&args[..], &["--jobs", "3"]].concat()));
    assert_eq!(serial.len(), 3);
    for (a, b) in serial.iter().zip(&parallel) {
        assert_eq!(a["graph"], b["graph"]);
        assert_eq!(a["bound"], b["bound"]);
        assert_eq!(a["certificate_digest"], b["certificate_digest"]);
    }
}

#[test]
fn graph_files_are_read() {
    let dir = std::env::temp_dir().join(format!("packbound-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c5.txt");
    std::fs::write(&path, "# C5\nn=5\nedges: (0,1) (1,2) (2,3) (3,4) (4,0)\n").unwrap();
    let out = packbound(&["bound", "--input", path.to_str().unwrap(), "--method", "theta", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = &json_lines(&out)[0];
    assert!((r["bound"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-6);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(packbound(&["bound", "--gen", "nonsense:3"]).status.code(), Some(2));
    assert_eq!(packbound(&["bound", "--gen", "cycle:5", "--t", "0"]).status.code(), Some(2));
    assert_eq!(packbound(&["frobnicate"]).status.code(), Some(2));
    let cap = packbound(&["bound", "--gen", "code:2,12,3", "--t", "3"]);
    assert_eq!(cap.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&cap.stderr).contains("cap"));
    assert_eq!(packbound(&["bound", "--gen", "cycle:9", "--vertex-cap", "5"]).status.code(), Some(3));
}

#[test]
fn three_point_warning_and_transitivity() {
    let out = packbound(&["bound", "--gen", "petersen", "--method", "three-point", "--vertex", "0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json_lines(&out)[0];
    assert!(r["warnings"].as_array().unwrap().iter().any(|w| w.as_str().unwrap().contains("--assume-transitive")));
    let out = packbound(&["bound", "--gen", "petersen", "--method", "three-point", "--assume-transitive", "--format", "json"]);
    let r = &json_lines(&out)[0];
    assert!(r["warnings"].as_array().unwrap().is_empty());
    assert!((r["certified_bound"].as_f64().unwrap() - 4.0).abs() < 1e-5);
    let irregular = packbound(&["bound", "--gen", "random:8,0.5,3", "--method", "three-point", "--assume-transitive"]);
    assert_eq!(irregular.status.code(), Some(2));
}

#[test]
fn delsarte_certificate_file() {
    let dir = std::env::temp_dir().join(format!("packbound-cert-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cert.json");
    let out = packbound(&[
        "bound", "--delsarte", "--n", "8", "--theta", "60deg", "--degree", "6", "--format", "json", "--certificate",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(cert["n"], 8);
    assert_eq!(cert["coefficients"].as_array().unwrap().len(), 7);
    let bound = cert["certified_bound"].as_f64().unwrap();
    assert!((240.0..=240.001).contains(&bound));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn export_and_gen_list() {
    let out = packbound(&["export-sdpa", "--gen", "cycle:5", "--t", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let p = packbound::sdp::import_sdpa(&text).unwrap();
    assert_eq!(p.m(), 10);
    let list = String::from_utf8(packbound(&["gen-list"]).stdout).unwrap();
    for name in ["cycle", "complete", "petersen", "code", "circle", "cap", "random"] {
        assert!(list.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn alpha_subcommand() {
    let out = packbound(&["alpha", "--gen", "petersen", "--gen", "cap:12,0.3,0.5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let records = json_lines(&out);
    assert_eq!(records[0]["alpha"], 4.0);
    assert_eq!(records[0]["witness"].as_array().unwrap().len(), 4);
}
