use std::process::Command;

use serde_json::Value;

fn igusa(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_igusa"))
        .args(args)
        .env_remove("IGUSA_ENUM_LIMIT")
        .env_remove("IGUSA_DEPTH_LIMIT")
        .env_remove("IGUSA_MAX_N")
        .output()
        .expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap();
    let json = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (out.status.code().unwrap(), json, text)
}

#[test]
fn zeta_of_x_squared() {
    let (code, v, _) = igusa(&["zeta", "--p", "3", "x^2", "--latex"]);
    assert_eq!(code, 0);
    assert_eq!(v["zeta"]["numerator"], "2/3");
    assert_eq!(v["zeta"]["denominator"], "1 - 1/3*t^2");
    assert_eq!(v["zeta"]["p"], 3);
    let latex = v["zeta"]["latex"].as_str().unwrap();
    assert!(latex.contains("3^{-2s}"), "{latex}");
}

#[test]
fn zeta_accepts_json_documents_and_files() {
    let doc = r#"{"n":1,"terms":[{"exp":[2],"coeff":"1"}]}"#;
    let (code, inline, _) = igusa(&["zeta", "--p", "3", doc]);
    assert_eq!(code, 0);
    let path = std::env::temp_dir().join(format!("igusa-cli-{}.json", std::process::id()));
    std::fs::write(&path, doc).unwrap();
    let (code, from_file, _) = igusa(&["zeta", "--p", "3", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(code, 0);
    assert_eq!(inline["zeta"], from_file["zeta"]);
}

#[test]
fn degenerate_square_has_a_witness() {
    let (code, v, _) = igusa(&["check-nondegenerate", "--p", "3", "(x+y)^2"]);
    assert_eq!(code, 0);
    assert_eq!(v["nondegenerate"], false);
    let w = &v["witness"];
    assert_eq!(w["face_id"], 0);
    let point: Vec<u64> = serde_json::from_value(w["point"].clone()).unwrap();
    // x + y = 0 with both coordinates nonzero mod 3
    assert_eq!(point.len(), 2);
    assert_eq!((point[0] + point[1]) % 3, 0);
    assert!(point.iter().all(|&c| c % 3 != 0));
    assert!(v["n_tau"].as_array().unwrap().len() == v["faces"].as_array().unwrap().len());

    let (code, v, _) = igusa(&["zeta", "--p", "3", "(x+y)^2"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "DegenerateInput");
}

#[test]
fn counterexample_scan_is_non_stabilizing() {
    let (code, v, _) = igusa(&[
        "truncate-scan",
        "--family",
        "counterexample",
        "--p",
        "3",
        "--d-max",
        "6",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"]["kind"], "non-stabilizing");
    assert_eq!(v["results"].as_array().unwrap().len(), 6);
    assert_eq!(v["results"][1]["zeta"]["numerator"], "2/3 + 1/3*t");
}

#[test]
fn square_tail_scan_stabilizes() {
    for engine in ["newton", "onevar"] {
        let (code, v, _) = igusa(&[
            "truncate-scan",
            "--family",
            "square-tail",
            "--p",
            "3",
            "--d-max",
            "6",
            "--engine",
            engine,
        ]);
        assert_eq!(code, 0, "{engine}");
        assert_eq!(v["verdict"]["kind"], "stabilized-at", "{engine}");
        assert_eq!(v["verdict"]["n"], 2, "{engine}");
    }
}

#[test]
fn zeta1_with_trace() {
    let (code, v, _) = igusa(&["zeta1", "--p", "3", "x^2 - x", "--trace"]);
    assert_eq!(code, 0);
    let (_, newton, _) = igusa(&["zeta", "--p", "3", "x^2 - x"]);
    assert_eq!(v["zeta"], newton["zeta"]);
    assert!(v["trace"]["children"].as_array().unwrap().len() == 3);
}

#[test]
fn oracle_count_output() {
    let (code, v, _) = igusa(&["oracle-count", "--p", "2", "x", "--m", "6", "--s", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["counts"], serde_json::json!([1, 1, 1, 1, 1, 1, 1]));
    assert_eq!(v["series"][0], "1/2");
    let lo = v["numeric"]["lower"].as_f64().unwrap();
    let hi = v["numeric"]["upper"].as_f64().unwrap();
    assert!(lo <= 2.0 / 3.0 && 2.0 / 3.0 <= hi);
    assert!(hi - lo <= 2f64.powi(-12) + 1e-15);
}

#[test]
fn newton_without_a_prime() {
    let (code, v, _) = igusa(&["newton", "x^3 + x*y + y^2"]);
    assert_eq!(code, 0);
    assert_eq!(v["generators"], serde_json::json!([[0, 2], [1, 1], [3, 0]]));
    assert_eq!(v["facets"].as_array().unwrap().len(), 4);
}

#[test]
fn exit_codes() {
    let doc = r#"{"n":2,"terms":[{"exp":[1,1],"coeff":"1/2"}]}"#;
    let (code, v, _) = igusa(&["zeta", "--p", "2", doc]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "ValidationError");

    let (code, v, _) = igusa(&["zeta", "--p", "4", "x"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "NotPrime");

    let (code, v, _) = igusa(&["zeta", "--p", "3", "x^ + 1"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["column"], 4);

    let (code, v, _) = igusa(&["zeta", "--p", "3", "x + 1"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "HypothesisViolated");

    let (code, v, _) = igusa(&["zeta1", "--p", "7", "(x^2 - 2)^2"]);
    assert_eq!(code, 4);
    assert_eq!(v["error"]["kind"], "DepthLimitExceeded");

    let (code, v, _) = igusa(&[
        "oracle-count",
        "--p",
        "3",
        "x*y*z",
        "--m",
        "6",
        "--enum-limit",
        "1000",
    ]);
    assert_eq!(code, 4);
    assert_eq!(v["error"]["kind"], "EnumLimitExceeded");

    let (code, v, _) = igusa(&["zeta", "--p", "3", "--no-such-flag", "x"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "UsageError");
}

#[test]
fn environment_overrides_limits() {
    let out = Command::new(env!("CARGO_BIN_EXE_igusa"))
        .args(["oracle-count", "--p", "3", "x*y", "--m", "4"])
        .env("IGUSA_ENUM_LIMIT", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    let out = Command::new(env!("CARGO_BIN_EXE_igusa"))
        .args(["zeta1", "--p", "3", "x^2 - 9"])
        .env("IGUSA_DEPTH_LIMIT", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn reports_are_deterministic() {
    let jobs: [&[&str]; 3] = [
        &["zeta", "--p", "3", "x^3 + x*y + y^2", "--terms"],
        &["newton", "x*y + z^2"],
        &[
            "truncate-scan",
            "--family",
            "counterexample",
            "--p",
            "5",
            "--d-max",
            "5",
        ],
    ];
    for job in jobs {
        let (_, _, a) = igusa(job);
        let (_, _, b) = igusa(job);
        let mut seq = job.to_vec();
        seq.push("--sequential");
        let (_, _, c) = igusa(&seq);
        assert_eq!(a, b);
        assert_eq!(a, c);
    }
}
