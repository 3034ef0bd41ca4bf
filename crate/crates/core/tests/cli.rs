use std::process::{Command, Output};

use serde_json::Value;

fn bilex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bilex"))
        .env_remove("BILEX_CATALOG")
        .args(args)
        .output()
        .unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn extract_prints_value_then_symbol() {
    let o = bilex(&[
        "extract",
        "--entry",
        "fp-11-demo",
        "--x1",
        "4",
        "--x2",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().next(), Some("3"));
    let o = bilex(&[
        "extract", "--entry", "ec-5", "--x1", "4/2", "--x2", "2/1", "--k", "1",
    ]);
    assert_eq!(String::from_utf8_lossy(&o.stdout), "1\nbits 1\n");
    let o = bilex(&[
        "extract",
        "--entry",
        "fpn-16-k2",
        "--x1",
        "1,1",
        "--x2",
        "1,1",
    ]);
    assert_eq!(String::from_utf8_lossy(&o.stdout), "3\ncoords (1,1)\n");
}

#[test]
fn exit_codes() {
    assert_eq!(
        bilex(&[
            "extract",
            "--entry",
            "fp-11-demo",
            "--x1",
            "x",
            "--x2",
            "10"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        bilex(&["extract", "--entry", "missing", "--x1", "1", "--x2", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bilex(&["charsum", "--entry", "fp-11-demo", "--check", "spectral"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bilex(&[
            "dh-demo",
            "--entry",
            "fp-1009-k2",
            "--secret-a",
            "0",
            "--secret-b",
            "3"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        bilex(&["audit", "--entry", "fp-1009-k2"]).status.code(),
        Some(0)
    );
    assert_eq!(
        bilex(&["audit", "--entry", "fpn-16-k1"]).status.code(),
        Some(4)
    );
}

#[test]
fn capacity_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.toml");
    std::fs::write(
        &path,
        "[[entry]]\nname = \"big\"\nkind = \"fp_lsb\"\np = 1000003\nq1 = 1000002\nq2 = 1000002\nk = 1\n",
    )
    .unwrap();
    let o = bilex(&[
        "--catalog",
        path.to_str().unwrap(),
        "audit",
        "--entry",
        "big",
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn audit_reports_parse_and_carry_the_schema() {
    let o = bilex(&["audit", "--all"]);
    let v = json(&o);
    let reports = v.as_array().unwrap();
    assert!(!reports.is_empty());
    let keys = [
        "params",
        "distribution_summary",
        "sd",
        "col",
        "guess",
        "lemma1",
        "bound",
        "bound_parts",
        "M",
        "status",
    ];
    for r in reports {
        let obj = r.as_object().unwrap();
        assert_eq!(obj.len(), keys.len());
        for k in keys {
            assert!(obj.contains_key(k), "missing {k}");
        }
        assert!(["pass", "vacuous", "fail"].contains(&r["status"].as_str().unwrap()));
        assert_eq!(r["lemma1"]["holds"], true);
    }
    let any_fail = reports.iter().any(|r| r["status"] == "fail");
    assert_eq!(o.status.code(), Some(if any_fail { 4 } else { 0 }));
    // round trip
    let text = serde_json::to_string_pretty(&v).unwrap() + "\n";
    assert_eq!(text.as_bytes(), &o.stdout[..]);
}

#[test]
fn audit_writes_out_file_and_honours_catalog_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = bilex(&[
        "audit",
        "--entry",
        "fp-1009-k2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v["sd"].as_f64().unwrap() <= v["bound"]["value"].as_f64().unwrap());

    let empty = dir.path().join("empty.toml");
    std::fs::write(&empty, "").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_bilex"))
        .env("BILEX_CATALOG", &empty)
        .args(["audit", "--all"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o), serde_json::json!([]));
}

#[test]
fn charsum_outputs() {
    let v = json(&bilex(&[
        "charsum",
        "--entry",
        "fp-11-demo",
        "--check",
        "pv",
    ]));
    assert!(v["value"].as_f64().unwrap() <= 11f64.sqrt());
    let v = json(&bilex(&[
        "charsum",
        "--entry",
        "fpn-4",
        "--check",
        "winterhof",
    ]));
    assert_eq!(v["value"], 4.0);
    let v = json(&bilex(&[
        "charsum", "--entry", "ec-1009", "--check", "bilinear",
    ]));
    assert_eq!(v["asymptotic"], true);
    let v = json(&bilex(&[
        "charsum",
        "--entry",
        "fpn-8",
        "--check",
        "subspaces",
    ]));
    assert_eq!(v["subspaces"], 1 + 7 + 7 + 1);
}

#[test]
fn dh_demo_is_deterministic() {
    let args = [
        "dh-demo",
        "--entry",
        "fp-1009-k2",
        "--secret-a",
        "123",
        "--secret-b",
        "456",
        "--seed",
        "5",
    ];
    let a = bilex(&args);
    let b = bilex(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["keys_match"], true);
    assert_eq!(v["key_a"], v["key_b"]);
    assert_eq!(v["shared_by_a"], v["shared_by_b"]);
}
