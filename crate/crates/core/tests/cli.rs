use std::process::{Command, Output};

use serde_json::Value;

fn sumdiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumdiff"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn count_command() {
    let out = sumdiff(&["count", "--m", "3", "--L", "2", "--B", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schemaVersion"], "1");
    assert_eq!(v["command"], "count");
    assert_eq!(v["results"]["count"].as_u64(), Some(10));
    assert_eq!(v["parameters"]["L"].as_u64(), Some(2));
    assert!(v["runtimeMillis"].is_u64());
}

#[test]
fn big_counts_stay_exact() {
    let out = sumdiff(&["count", "--m", "200", "--L", "300", "--B", "3"]);
    let v = json(&out);
    let text = v["results"]["count"].to_string();
    assert!(text.len() > 100 && text.chars().all(|c| c.is_ascii_digit()));
}

#[test]
fn rate_command() {
    let out = sumdiff(&["rate", "--c", "1", "--B", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["results"]["rate"].as_f64(), Some(0.0));
    assert_eq!(v["results"]["tStar"]["kind"], "none");

    let v = json(&sumdiff(&["rate", "--c", "0.25", "--B", "1"]));
    let r = v["results"]["rate"].as_f64().unwrap();
    assert!((r - 0.130812).abs() < 1e-6);
    assert!(v["results"]["tStar"]["value"].as_f64().unwrap() < 0.0);
}

#[test]
fn enumerate_command() {
    let v = json(&sumdiff(&["enumerate", "--m", "2", "--L", "1", "--B", "1"]));
    assert_eq!(
        v["results"]["vectors"],
        serde_json::json!([[0, 0], [0, 1], [1, 0]])
    );
    let out = sumdiff(&[
        "enumerate",
        "--m",
        "3",
        "--L",
        "3",
        "--B",
        "1",
        "--cap",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap of 5"));
}

#[test]
fn enumeration_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_sumdiff"))
        .args(["enumerate", "--m", "3", "--L", "3", "--B", "1"])
        .env("SUMDIFF_ENUM_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_command() {
    let out = sumdiff(&["verify", "--max-m", "4", "--max-L", "5", "--max-B", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["results"]["allPassed"], true);
    let g = v["results"]["g"].as_array().unwrap();
    assert_eq!(g.len(), 5 * 6 * 3);
    for check in g {
        assert_eq!(check["sumsetIdentity"], true);
        assert_eq!(check["diffsetIdentity"], true);
    }
}

#[test]
fn verify_cap_error_exits_2() {
    let out = sumdiff(&[
        "verify", "--max-m", "2", "--max-L", "2", "--max-B", "1", "--cap", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bound_command_exports_sets() {
    let dir = std::env::temp_dir().join(format!("sumdiff-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let u_path = dir.join("u.txt");
    let d_path = dir.join("d.txt");
    let out = sumdiff(&[
        "bound",
        "--m",
        "2",
        "--L",
        "1",
        "--B",
        "2",
        "--export-u",
        u_path.to_str().unwrap(),
        "--export-diffset",
        d_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&u_path).unwrap(), "0\n1\n5\n");
    assert_eq!(
        std::fs::read_to_string(&d_path).unwrap(),
        "-5\n-4\n-1\n0\n1\n4\n5\n"
    );
    let v = json(&out);
    assert_eq!(v["results"]["d"].as_u64(), Some(7));
    assert_eq!(v["results"]["s"].as_u64(), Some(6));
    assert_eq!(v["results"]["q"].as_u64(), Some(11));
    std::fs::remove_dir_all(&dir).unwrap();

    let out = sumdiff(&["bound", "--m", "0", "--L", "0", "--B", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn optimize_command() {
    let v = json(&sumdiff(&["optimize", "--B", "5", "--eps", "1e-10"]));
    let t = v["results"]["report"]["thetaMinus1"].as_f64().unwrap();
    assert!((t - 0.173077279785136).abs() <= 1e-8);
}

#[test]
fn table1_csv_and_json_agree() {
    let csv = sumdiff(&["table1", "--format", "csv"]);
    let js = sumdiff(&["table1", "--format", "json"]);
    assert_eq!(csv.status.code(), Some(0));
    let v = json(&js);
    let rows = v["results"]["rows"].as_array().unwrap();
    let text = String::from_utf8(csv.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("B,eps=1e-4,eps=1e-6,eps=1e-8,eps=1e-10"));
    for (line, row) in lines.zip(rows) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(
            fields[0].parse::<u64>().unwrap(),
            row[0]["B"].as_u64().unwrap()
        );
        for (f, cell) in fields[1..].iter().zip(row.as_array().unwrap()) {
            let a: f64 = f.parse().unwrap();
            let b = cell["thetaMinus1"].as_f64().unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
            // full round-trip precision
            assert!(f.trim_start_matches("0.").len() >= 15);
        }
    }
    assert_eq!(v["results"]["best"]["B"].as_u64(), Some(5));
}

#[test]
fn table1_is_byte_identical() {
    let args = ["--no-timing", "table1", "--b-range", "3..6"];
    let a = sumdiff(&args);
    let b = sumdiff(&args);
    assert_eq!(a.stdout, b.stdout);
    let csv = ["table1", "--format", "csv", "--eps-list", "1e-8,1e-10"];
    assert_eq!(sumdiff(&csv).stdout, sumdiff(&csv).stdout);
}

#[test]
fn usage_errors() {
    assert_eq!(sumdiff(&[]).status.code(), Some(2));
    assert_eq!(sumdiff(&["count", "--m", "1"]).status.code(), Some(2));
    assert_eq!(
        sumdiff(&["table1", "--b-range", "7..3"]).status.code(),
        Some(2)
    );
    assert_eq!(sumdiff(&["optimize", "--B", "0"]).status.code(), Some(2));
}
