use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_subgraph-lg"))
}

fn patterns() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../patterns")
}

fn pattern(name: &str) -> String {
    patterns().join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn exponent_triangle() {
    let o = run(&["exponent", &pattern("triangle.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("t=1/27 total=35/27≈1.296296\n"), "{}", stdout(&o));
}

#[test]
fn exponent_path_and_json() {
    let o = run(&["exponent", &pattern("path3.json")]);
    assert!(stdout(&o).contains("total=11/9"));
    let o = run(&["exponent", &pattern("k4.json"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["total"], "59/40");
    assert_eq!(v["winner"], "g2");
}

#[test]
fn exponent_rejects_single_edge() {
    let o = run(&["exponent", &pattern("edge.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k must be ≥ 3"));
}

#[test]
fn missing_file_is_an_input_error() {
    let o = run(&["exponent", "/nonexistent/pattern.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["exponent"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn odd_r_is_infeasible() {
    let o = run(&["verify", &pattern("triangle.json"), "--r", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("r must be even"));
}

#[test]
fn host_too_small_is_infeasible() {
    let o = run(&["verify", &pattern("triangle.json"), "--n", "8", "--samples", "10"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_reports_every_check() {
    let o = run(&[
        "verify",
        &pattern("triangle.json"),
        "--construction",
        "g2",
        "--samples",
        "500",
    ]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.contains("paths\tg2\tn=9 r=4 rs=2 lambda=2 paths=500"));
    assert!(text.contains("plain_probability\t-\texact=1/2 s=1/2\tpass"));
    assert!(text.contains("hidden_probability\t-\testimate="));
    assert!(text.contains(" se="));
}

#[test]
fn verify_is_byte_identical_for_a_seed() {
    let args = ["verify", &pattern("triangle.json"), "--samples", "300", "--seed", "7", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
    let c = run(&["verify", &pattern("triangle.json"), "--samples", "300", "--seed", "8", "--format", "json"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn compare_triangle() {
    let o = run(&["compare", &pattern("triangle.json")]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0));
    assert!(text.starts_with("pattern\tk\tm\td\tmethod"));
    assert!(text.contains("triangle\t3\t3\t2\twalk-balanced\t3/5\t-\t6/5\t13/10\t13/10\t13/10\t1.300000"));
    assert!(text.contains("triangle\t3\t3\t2\twalk\t2/3\t-\t4/3\t4/3\t23/18\t4/3\t1.333333"));
    assert!(text.contains("best\t-\t1/27\t-\t-\t-\t35/27\t1.296296"));
}

#[test]
fn compare_directory_is_a_batch() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["triangle.json", "k4.json", "edge.json", "c4.json"] {
        std::fs::copy(patterns().join(name), dir.path().join(name)).unwrap();
    }
    let o = run(&["compare", dir.path().to_str().unwrap()]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(text.lines().filter(|l| l.starts_with("pattern\t")).count(), 1);
    // three usable patterns, five rows each, in file-name order
    let rows: Vec<&str> = text.lines().skip(1).filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 15);
    assert!(rows[0].starts_with("c4\t"));
    assert!(rows[14].starts_with("triangle\t"));
    assert!(text.contains("# skipped:"));
}

#[test]
fn optimize_k4() {
    let o = run(&["optimize", &pattern("k4.json"), "--n", "1e6", "--construction", "g2", "--levels", "2"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(row[1], "g2");
    let log_n: f64 = row[9].parse().unwrap();
    assert!(log_n <= 59.0 / 40.0 + 0.02, "{text}");
    assert!(row[10].starts_with("59/40"));
}

#[test]
fn help_documents_columns_and_exit_codes() {
    let o = run(&["--help"]);
    let text = stdout(&o);
    assert!(text.contains("pattern k m d method x t S U C exponent decimal achieved"));
    assert!(text.contains("Exit codes"));
}
