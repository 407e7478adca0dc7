use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn expected(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "expected", name].iter().collect();
    std::fs::read_to_string(p).unwrap()
}

fn toridiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toridiv")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Runs the command, requires exit 0, and compares with the stored report.
fn golden(args: &[&str], report: &str) -> String {
    let o = toridiv(args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out, expected(report), "report {report} changed");
    out
}

#[test]
fn check_reports_the_quadric_witness() {
    let out = golden(
        &["check", &fixture("quadric_cone_fan.json"), &fixture("quadric_e1.json")],
        "check_quadric_e1.txt",
    );
    assert_eq!(out.lines().next(), Some("NotQCartier (witness cone 0)"));
}

#[test]
fn check_on_the_plane() {
    let out = golden(
        &["check", &fixture("p2_fan.json"), &fixture("p2_hyperplane.json")],
        "check_p2_hyperplane.txt",
    );
    assert!(out.starts_with("Cartier\n"));
}

#[test]
fn check_family_canonical_class() {
    let o = toridiv(&["check", &fixture("acc_a3_fan.json"), &fixture("acc_a3_canonical.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("NotQCartier (witness cone 0)"));
}

#[test]
fn check_json_is_tagged() {
    let o = toridiv(&[
        "check",
        &fixture("quadric_cone_fan.json"),
        &fixture("quadric_e1.json"),
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["cartier"]["status"], "NotQCartier");
    assert_eq!(v["cartier"]["cone"], 0);
    assert_eq!(v["complete"], false);
}

#[test]
fn sections_list_and_hilbert_function() {
    golden(
        &["sections", &fixture("p2_fan.json"), &fixture("p2_hyperplane.json")],
        "sections_p2_hyperplane.txt",
    );
    let out = golden(
        &[
            "sections",
            &fixture("p2_fan.json"),
            &fixture("p2_hyperplane.json"),
            "--m-max",
            "10",
            "--format",
            "csv",
        ],
        "sections_p2_hilbert.csv",
    );
    let mut r = csv::Reader::from_reader(out.as_bytes());
    for (m, rec) in r.records().enumerate() {
        let h: u64 = rec.unwrap()[1].parse().unwrap();
        let m = m as u64;
        assert_eq!(h, (m + 1) * (m + 2) / 2);
    }
}

#[test]
fn hilbert_of_the_dual_quadric() {
    golden(&["hilbert", &fixture("quadric_cone_fan.json"), "--dual"], "hilbert_quadric_dual.txt");
    let o = toridiv(&["hilbert", &fixture("quadric_cone_fan.json"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["cones"][0]["basis"].as_array().unwrap().len(), 4);
}

#[test]
fn gg_and_qnef() {
    golden(
        &["gg", &fixture("cube_fan.json"), &fixture("cube_prime_corner.json")],
        "gg_cube_prime_corner.txt",
    );
    golden(
        &["qnef", &fixture("quadric_complete_fan.json"), &fixture("quadric_complete_d.json")],
        "qnef_quadric_complete_d.txt",
    );
    let o = toridiv(&["gg", &fixture("quadric_complete_fan.json"), &fixture("quadric_complete_d.json")]);
    assert_eq!(stdout(&o), "Yes\n");
}

#[test]
fn qcartierize_text_and_json() {
    golden(
        &["qcartierize", &fixture("cube_fan.json"), &fixture("cube_corner.json")],
        "qcartierize_cube_corner.txt",
    );
    let o = toridiv(&[
        "qcartierize",
        &fixture("cube_fan.json"),
        &fixture("cube_corner.json"),
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["fan_prime"]["rays"].as_array().unwrap().len(), 8);
    assert_eq!(v["fan_prime"]["max_cones"].as_array().unwrap().len(), 9);
    assert_eq!(v["dbar_status"]["status"], "QCartier");
    let walls = v["walls"].as_array().unwrap();
    assert!(walls.iter().all(|w| w["value"].is_string()));
    assert!(walls.iter().filter(|w| w["extracted"] == true).all(|w| w["value"] != "0"));
}

#[test]
fn qcartierize_flags_the_vertex_counterexample() {
    let o = toridiv(&["qcartierize", &fixture("counterexample_fan.json"), &fixture("counterexample_d.json")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("vertex claim"));
    assert!(o.stdout.is_empty());
}

#[test]
fn qnt_pencil() {
    golden(
        &[
            "qnt",
            &fixture("p2_fan.json"),
            &fixture("p2_minus_hyperplane.json"),
            "--ample",
            &fixture("p2_hyperplane.json"),
        ],
        "qnt_p2_pencil.txt",
    );
    let o = toridiv(&[
        "qnt",
        &fixture("cube_fan.json"),
        &fixture("cube_prime_corner.json"),
        "--ample",
        &fixture("cube_anticanonical.json"),
    ]);
    assert!(stdout(&o).starts_with("qnt = 1/2\n"));
}

#[test]
fn qnt_with_missing_ample_is_a_usage_error() {
    let o = toridiv(&[
        "qnt",
        &fixture("p2_fan.json"),
        &fixture("p2_hyperplane.json"),
        "--ample",
        &fixture("missing.json"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.json"));
}

#[test]
fn qnt_with_non_ample_divisor_is_a_precondition_error() {
    let o = toridiv(&[
        "qnt",
        &fixture("p2_fan.json"),
        &fixture("p2_hyperplane.json"),
        "--ample",
        &fixture("p2_minus_hyperplane.json"),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn pullback_csv() {
    golden(
        &[
            "pullback",
            &fixture("p2_fan.json"),
            &fixture("p2_hyperplane.json"),
            "--queries",
            &fixture("p2_queries.json"),
            "--format",
            "csv",
        ],
        "pullback_p2.csv",
    );
}

#[test]
fn mld_on_the_family() {
    golden(
        &["mld", &fixture("acc_a3_fan.json"), "--bound", "8", "--which", "plus", "--distinguished", "5,0,2"],
        "mld_acc_a3_plus.txt",
    );
    let o = toridiv(&["mld", &fixture("acc_a3_fan.json"), "--bound", "2", "--which", "minus", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["which"], "minus");
}

#[test]
fn acc_family_csv() {
    let out = golden(&["acc-family", "--a", "1..5"], "acc_family_1_5.csv");
    let mut r = csv::Reader::from_reader(out.as_bytes());
    let header = r.headers().unwrap().clone();
    let col = header.iter().position(|h| h == "closed_form").unwrap();
    let closed: Vec<String> = r.records().map(|x| x.unwrap()[col].to_string()).collect();
    assert_eq!(closed, ["3", "13/4", "17/5", "7/2", "25/7"]);
}

#[test]
fn acc_family_writes_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let o = toridiv(&["acc-family", "--a", "1..5", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), expected("acc_family_1_5.csv"));
}

#[test]
fn acc_family_rejects_bad_ranges() {
    assert_eq!(toridiv(&["acc-family", "--a", "5..1"]).status.code(), Some(2));
    assert_eq!(toridiv(&["acc-family", "--a", "x"]).status.code(), Some(2));
    assert_eq!(toridiv(&["acc-family", "--a", "0..2"]).status.code(), Some(2));
}

#[test]
fn gg_conjecture_on_the_cube() {
    golden(
        &[
            "gg-conjecture",
            &fixture("cube_fan.json"),
            &fixture("cube_prime_corner.json"),
            "--ample",
            &fixture("cube_anticanonical.json"),
            "--m-max",
            "4",
        ],
        "gg_conjecture_cube.txt",
    );
}

#[test]
fn input_errors_exit_two() {
    let cases = [
        ("p2_fan.json", "p2_two_coeffs.json", "2 coefficients"),
        ("p2_fan.json", "p2_bad_rational.json", "1/0"),
        ("p2_fan.json", "p2_truncated.json", "line"),
        ("invalid_fan.json", "p2_hyperplane.json", "invalid fan"),
    ];
    for (fan, div, needle) in cases {
        let o = toridiv(&["check", &fixture(fan), &fixture(div)]);
        assert_eq!(o.status.code(), Some(2), "{div}");
        assert!(stderr(&o).contains(needle), "{div}: {}", stderr(&o));
    }
    assert_eq!(toridiv(&["check"]).status.code(), Some(2));
    let o = toridiv(&["check", &fixture("p2_fan.json"), &fixture("p2_hyperplane.json"), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one() {
    // The quadric cone alone is not complete.
    let o = toridiv(&["gg", &fixture("quadric_cone_fan.json"), &fixture("quadric_e1.json")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let args = ["qcartierize", &fixture("cube_fan.json"), &fixture("cube_corner.json"), "--format", "json"];
    assert_eq!(toridiv(&args).stdout, toridiv(&args).stdout);
}
