use std::path::PathBuf;
use std::process::{Command, Output};

fn qgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("qgraph-{}-{name}", std::process::id()))
}

#[test]
fn verify_identities_defaults_pass() {
    let out = qgraph(&["verify-identities"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 8);
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
}

#[test]
fn verify_identities_minimal() {
    let out = qgraph(&["verify-identities", "--max-n", "2"]);
    assert!(out.status.success(), "{}", stdout(&out));
}

#[test]
fn corrupted_rhs_fails_with_counterexample() {
    let out = qgraph(&["verify-identities", "--max-n", "6", "--corrupt-rhs"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let fail = text.lines().find(|l| l.starts_with("FAIL")).expect("a failing line");
    assert!(fail.contains("(n=2, q=1)"), "{fail}");
}

#[test]
fn verify_identities_rejects_bad_limits() {
    assert_eq!(qgraph(&["verify-identities", "--max-n", "201"]).status.code(), Some(2));
    assert_eq!(qgraph(&["verify-identities", "--order", "61"]).status.code(), Some(2));
}

#[test]
fn form_factor_table() {
    let out = qgraph(&["form-factor", "--n", "1..12"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows[0][..5], ["n", "K_exact", "K_po", "K_approx", "K_cue"]);
    assert_eq!(rows.len(), 13);
    assert_eq!(rows[1][1], "0.5");
    assert_eq!(rows[1][4], "0.5");
    assert_eq!(rows[1][5], "1/2");
    assert_eq!(rows[2][1], "0.75");
    assert_eq!(rows[2][4], "1.0");
    for row in &rows[1..] {
        assert_eq!(row[1], row[2]);
        assert_eq!(row[5], row[6]);
    }
}

#[test]
fn form_factor_rejects_other_graphs() {
    let out = qgraph(&["form-factor", "--graph", "complete:4"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qgraph(&["form-factor", "--graph", "no-such-graph"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown graph spec"));
}

#[test]
fn mc_ring_n2_within_four_sigma() {
    let args = ["mc", "--graph", "ring", "--beta", "2", "--n", "2", "--seed", "42", "--samples", "20000"];
    let out = qgraph(&args);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows[0], ["n", "estimate", "stderr", "exact_if_known"]);
    let estimate: f64 = rows[1][1].parse().unwrap();
    let stderr: f64 = rows[1][2].parse().unwrap();
    assert!((estimate - 0.75).abs() < 4.0 * stderr, "{estimate} +- {stderr}");
    assert_eq!(stdout(&qgraph(&args)), stdout(&out));
}

#[test]
fn mc_without_closed_form_leaves_exact_empty() {
    let out = qgraph(&["mc", "--graph", "complete:4", "--beta", "1", "--n", "3", "--samples", "200"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows[1][3], "");
    assert_eq!(qgraph(&["mc", "--beta", "3"]).status.code(), Some(2));
    assert_eq!(qgraph(&["mc", "--samples", "10"]).status.code(), Some(2));
}

#[test]
fn trace_identity_ladder_converges() {
    let out = qgraph(&["trace-identity", "--nu", "2", "--kappa", "1"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows[0], ["epsilon", "sum", "target", "abs_error"]);
    assert_eq!(rows.len(), 5);
    let errors: Vec<f64> = rows[1..].iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(rows[1][2].parse::<f64>().unwrap(), -1.0);
}

#[test]
fn trace_identity_flags_non_decaying_ladder() {
    let out = qgraph(&["trace-identity", "--nu", "0", "--kappa", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let out = qgraph(&["trace-identity", "--nu", "1", "--kappa", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn famsum_ring_family_counts() {
    let out = qgraph(&["famsum", "--graph", "ring", "--n", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["family_key", "orbit_count", "amp_re", "amp_im"]);
    let q2 = rows.iter().find(|r| r[0] == "2 3").expect("family q=2");
    assert_eq!(q2[1], "10");
    let total: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# form_factor,"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((total - 0.8125).abs() < 1e-12);
}

#[test]
fn json_mirrors_csv_fields() {
    let out = qgraph(&["famsum", "--graph", "complete:2", "--beta", "1", "--n", "4", "--format", "json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["form_factor"], 2.0);
    let row = value["rows"][0].as_object().unwrap();
    let keys: Vec<&str> = row.keys().map(String::as_str).collect();
    assert_eq!(keys, ["family_key", "orbit_count", "amp_re", "amp_im"]);
    assert_eq!(row["orbit_count"], 2);
}

#[test]
fn out_file_written() {
    let path = temp_path("ff.csv");
    let out = qgraph(&["form-factor", "--n", "3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("n,K_exact"));
    assert!(text.contains("3,1.25,1.25"));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn graph_file_input() {
    let path = temp_path("triangle.graph");
    std::fs::write(&path, "3 3\n1 2 1.0 0\n2 3 1.0 0\n3 1 1.0 0\n").unwrap();
    let out = qgraph(&["famsum", "--graph", path.to_str().unwrap(), "--beta", "2", "--n", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&stdout(&out));
    // each orientation of the triangle, from three starting bonds
    assert_eq!(rows.len(), 3);
    assert!(rows[1..].iter().all(|r| r[1] == "3"));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn conjecture_report_columns() {
    let out = qgraph(&["conjecture", "--vertices", "4", "--samples", "200", "--max-tau", "0.5"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows[0], ["graph", "beta", "n", "tau", "estimate", "stderr", "rmt"]);
    // 2B = 12, so n = 1..=6 for each beta
    assert_eq!(rows.len(), 13);
}
