use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn scansim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scansim")).args(args).env_remove("SCANSIM_FIXTURES").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_spec(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

const TABLE_REGIME: &str = r#"
layout = "grid_2x2"
phrase = "a_"
engine = "both"
runs = 100000
seed = 11
[fixed]
delta = 0.1
sigma = 0.3
f = 0.1
lambda = 0.01
"#;

#[test]
fn capacity_prints_optimum() {
    let o = scansim(&["capacity", "--d", "0", "--g", "1", "--f", "0,0.5"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "d,g,f,beta,rate,noisy_rate");
    assert_eq!(lines[1], "0,1,0,0.500000,1.000000,1.000000");
    assert_eq!(lines[2], "0,1,0.5,0.500000,1.000000,0.000000");
}

#[test]
fn sweep_is_reproducible_and_honours_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "lambda.toml",
        r#"
        layout = "grid_2x2"
        phrase = "at_ a_"
        engine = "both"
        runs = 300
        seed = 1
        [sweep]
        param = "lambda"
        start = 0.0
        stop = 0.2
        step = 0.1
        [fixed]
        sigma = 0.1
        f = 0.05
        "#,
    );
    let a = scansim(&["sweep", &spec]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = scansim(&["sweep", &spec]);
    assert_eq!(stdout(&a), stdout(&b));
    let text = stdout(&a);
    assert!(text.starts_with("# scansim sweep"));
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 1 + 3 * 2);

    let out = dir.path().join("out.csv");
    let c = scansim(&["sweep", &spec, "--seed", "2", "--out", out.to_str().unwrap()]);
    assert!(c.status.success());
    assert!(stdout(&c).is_empty());
    let reseeded = std::fs::read_to_string(&out).unwrap();
    let analytic = |t: &str| -> Vec<String> { t.lines().filter(|l| l.contains(",analytic,")).map(String::from).collect() };
    assert_eq!(analytic(&text), analytic(&reseeded));
    assert_ne!(text, reseeded);
}

#[test]
fn validate_passes_sound_models_and_flags_sabotage() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "table.toml", TABLE_REGIME);
    let ok = scansim(&["validate", &spec]);
    let report = stdout(&ok);
    assert!(ok.status.success(), "{report}");
    assert!(report.ends_with("overall: PASS\n"));

    let bad = scansim(&["validate", &spec, "--scan-offset", "1"]);
    assert_eq!(bad.status.code(), Some(1));
    let report = stdout(&bad);
    assert!(report.contains("FAIL \"a_\" scans"));
    assert!(report.contains("overall: FAIL"));

    let analytic_only = scansim(&["validate", &spec, "--engine", "analytic"]);
    assert_eq!(analytic_only.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&analytic_only.stderr).contains("engine"));
}

#[test]
fn validate_noiseless_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "noiseless.toml",
        r#"
        mode = "both"
        layout = "alphabet_8x5"
        phrase = "dog_"
        engine = "both"
        runs = 500
        [fixed]
        delta = 0.0
        sigma = 1e-6
        f = 0.0
        lambda = 0.0
        t_fast = 0.5
        "#,
    );
    let o = scansim(&["validate", &spec]);
    let report = stdout(&o);
    assert!(o.status.success(), "{report}");
    assert!(report.lines().filter(|l| l.starts_with("PASS")).all(|l| l.contains("max|z|=0.000")));
}

#[test]
fn layouts_resolve_from_fixture_dir_and_spec_dir() {
    let dir = tempfile::tempdir().unwrap();
    let layout = "rows = [[\"a\", \"_\"], [\"b\", \"<\"]]\ndelete = \"<\"\nterminators = [\"_\"]\n";
    std::fs::create_dir(dir.path().join("fixtures")).unwrap();
    std::fs::write(dir.path().join("fixtures/tiny.toml"), layout).unwrap();
    std::fs::write(dir.path().join("local.toml"), layout).unwrap();
    let by_name = write_spec(dir.path(), "a.toml", "layout = \"tiny\"\nphrase = \"ab_\"\n");
    let by_path = write_spec(dir.path(), "b.toml", "layout = \"local.toml\"\nphrase = \"ab_\"\n");

    let missing = scansim(&["sweep", &by_name]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("tiny"));

    let o = Command::new(env!("CARGO_BIN_EXE_scansim"))
        .args(["sweep", &by_name])
        .env("SCANSIM_FIXTURES", dir.path().join("fixtures"))
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(scansim(&["sweep", &by_path]).status.success());
}

#[test]
fn bad_specs_fail_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_spec(dir.path(), "x.toml", "layout = \"grid_2x2\"\nbogus = 1\n");
    let o = scansim(&["sweep", &unknown]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
    let minus = write_spec(
        dir.path(),
        "m.toml",
        "layout = \"grid_2x2\"\nphrase = \"a_\"\ndelay_rule = \"adaptive_minus\"\n[fixed]\ndelta = 0.1\nsigma = 0.1\n",
    );
    let o = scansim(&["sweep", &minus]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("adaptive_minus"));
}

#[test]
fn serve_answers_health_checks() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_scansim"))
        .args(["serve", "--port", "0"])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stderr.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().rsplit("http://").next().unwrap().to_string();
    let mut stream = TcpStream::connect(&addr).unwrap();
    write!(stream, "GET /healthz HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n").unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("\"ok\""));
}
