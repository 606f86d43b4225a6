use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn spectra(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectra"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("SPECTRA_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn crate_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn error_payload(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("an error line");
    serde_json::from_str(line).unwrap_or_else(|e| panic!("not JSON ({e}): {text}"))
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

const MATRIX: &str = "examples/tridiagonal_period5.json";

#[test]
fn matrix_example_writes_cloud_certificate_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let input = crate_file(MATRIX);
    let out = spectra(
        tmp.path(),
        &["--svg", "matrix", "--input", input.to_str().unwrap(), "--n", "200"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["cloud.csv", "cloud.svg", "certificate.json", "manifest.json"] {
        assert!(tmp.path().join(name).exists(), "{name} missing");
    }
    let cert: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("certificate.json")).unwrap()).unwrap();
    let outer = cert["certificate"]["outer_radius"].as_f64().unwrap();
    assert!((outer - 200f64.powf(-0.1)).abs() < 1e-12);
    assert!(cert["points"].as_u64().unwrap() > 0);
    let m = manifest(tmp.path());
    assert_eq!(m["command"], "matrix");
    assert!(m["wall_time_seconds"].as_f64().is_some());
    assert!(m["versions"]["spectra-cli"].is_string());
    let svg = fs::read_to_string(tmp.path().join("cloud.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<circle"));
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = [
        "schrodinger",
        "--mu",
        "5i",
        "--K",
        "6",
        "--n",
        "32",
        "--C",
        "1e-3",
        "--square",
        "3,0",
        "--square",
        "4,1",
    ];
    for dir in [&a, &b] {
        let out = spectra(dir.path(), &args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let read = |d: &tempfile::TempDir, f: &str| fs::read(d.path().join(f)).unwrap();
    assert_eq!(read(&a, "cloud.csv"), read(&b, "cloud.csv"));
    assert_eq!(read(&a, "certificate.json"), read(&b, "certificate.json"));
}

#[test]
fn cloud_csv_round_trips_through_metrics() {
    let tmp = tempfile::tempdir().unwrap();
    let cloud_dir = tmp.path().join("cloud");
    let input = crate_file(MATRIX);
    let out = spectra(&cloud_dir, &["matrix", "--input", input.to_str().unwrap(), "--n", "60"]);
    assert!(out.status.success());
    let csv = cloud_dir.join("cloud.csv");
    let text = fs::read_to_string(&csv).unwrap();
    let parsed = spectra_core::SpectralCloud::from_csv(&text).unwrap();
    assert_eq!(parsed.to_csv(), text);

    let out = spectra(
        &tmp.path().join("m"),
        &[
            "metrics",
            "--a",
            csv.to_str().unwrap(),
            "--b",
            csv.to_str().unwrap(),
            "--metric",
            "aw",
        ],
    );
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["value"].as_f64(), Some(0.0));
    assert_eq!(report["points_a"].as_u64(), Some(parsed.len() as u64));

    let out = spectra(
        &tmp.path().join("c"),
        &["compare", "--a", csv.to_str().unwrap(), "--b", csv.to_str().unwrap()],
    );
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["hausdorff"].as_f64(), Some(0.0));
    assert_eq!(report["attouch_wets"].as_f64(), Some(0.0));
}

#[test]
fn configuration_errors_exit_2_with_payload() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["matrix", "--n", "4"],
        &[
            "schrodinger",
            "--mu",
            "10",
            "--K",
            "8",
            "--n",
            "16",
            "--C",
            "tight",
            "--window",
            "0,45,-6,6",
        ],
        &[
            "schrodinger",
            "--mu",
            "10",
            "--K",
            "8",
            "--n",
            "16",
            "--C",
            "1e-3",
            "--window",
            "0,45",
        ],
        &["frobnicate"],
    ];
    for args in cases {
        let out = spectra(tmp.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let p = error_payload(&out);
        assert_eq!(p["error"]["kind"], "config");
        assert_eq!(p["error"]["exit_code"], 2);
    }
}

#[test]
fn computation_errors_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let out = spectra(
        tmp.path(),
        &[
            "discriminant",
            "--potential",
            "1/x",
            "--window",
            "0,2,-1,1",
            "--spacing",
            "0.5",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_payload(&out)["error"]["kind"], "computation");
}

#[test]
fn io_errors_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    let out = spectra(
        tmp.path(),
        &["matrix", "--input", "/definitely/not/here.json", "--n", "4"],
    );
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_payload(&out)["error"]["kind"], "io");

    // A regular file where the output directory should go.
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let input = crate_file(MATRIX);
    let out = spectra(
        &blocker.join("out"),
        &["matrix", "--input", input.to_str().unwrap(), "--n", "4"],
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn output_directory_defaults_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let input = crate_file(MATRIX);
    let out = Command::new(env!("CARGO_BIN_EXE_spectra"))
        .args(["matrix", "--input", input.to_str().unwrap(), "--n", "10"])
        .env("SPECTRA_OUT_DIR", tmp.path().join("from-env"))
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(tmp.path().join("from-env/cloud.csv").exists());
}

#[test]
fn run_config_dispatches_to_subcommand() {
    let tmp = tempfile::tempdir().unwrap();
    let input = crate_file(MATRIX);
    let target = tmp.path().join("via-config");
    let config = serde_json::json!({
        "subcommand": "matrix",
        "parameters": { "input": input, "n": 30, "exhaustive": true },
        "out_dir": target,
        "seed": 7
    });
    let path = tmp.path().join("run.json");
    fs::write(&path, config.to_string()).unwrap();
    let out = spectra(&tmp.path().join("unused"), &["run", "--config", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(&target);
    assert_eq!(m["command"], "matrix");
    assert_eq!(m["inputs"]["args"]["exhaustive"], true);
    assert_eq!(m["inputs"]["args"]["n"], 30);

    fs::write(
        &path,
        r#"{"subcommand": "matrix", "parameters": {"n": 30}, "colour": "red"}"#,
    )
    .unwrap();
    let out = spectra(tmp.path(), &["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn schrodinger_config_file_matches_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let config = serde_json::json!({
        "potential": "4*cos(2*pi*x)",
        "K": 6,
        "n": 32,
        "C": 1e-3,
        "squares": [[2, 0], [3, 0]],
        "shift_mode": "both"
    });
    let path = tmp.path().join("s.json");
    fs::write(&path, config.to_string()).unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(spectra(&a, &["schrodinger", "--config", path.to_str().unwrap()])
        .status
        .success());
    let flags = [
        "schrodinger",
        "--potential",
        "4*cos(2*pi*x)",
        "--K",
        "6",
        "--n",
        "32",
        "--C",
        "1e-3",
        "--square",
        "2,0",
        "--square",
        "3,0",
    ];
    assert!(spectra(&b, &flags).status.success());
    assert_eq!(
        fs::read(a.join("cloud.csv")).unwrap(),
        fs::read(b.join("cloud.csv")).unwrap()
    );
}

#[test]
fn tower_writes_one_cloud_per_n_and_a_trace() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "tower",
        "--potential",
        "abs(x - 0.5)^(-1/4)",
        "--x0",
        "0.5",
        "--m",
        "4",
        "--n-sweep",
        "8,16",
        "--samples",
        "64",
        "--window",
        "0,12,-1,1",
    ];
    let out = spectra(tmp.path(), &args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(tmp.path().join("cloud_n8.csv").exists() && tmp.path().join("cloud_n16.csv").exists());
    let trace = fs::read_to_string(tmp.path().join("trace.csv")).unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines[0], "n,d_aw_to_previous");
    assert_eq!(lines[1], "8,");
    assert!(lines[2].starts_with("16,"));
}

#[test]
fn shipped_examples_and_schemas_parse() {
    for rel in [
        "schemas/matrix.schema.json",
        "schemas/run_config.schema.json",
        "schemas/schrodinger_config.schema.json",
        "examples/mathieu_window.json",
        "examples/run_tower.json",
    ] {
        let text = fs::read_to_string(crate_file(rel)).unwrap();
        serde_json::from_str::<Value>(&text).unwrap_or_else(|e| panic!("{rel}: {e}"));
    }
    let op = fs::read_to_string(crate_file(MATRIX)).unwrap();
    spectra_core::periodic_matrix::BandedPeriodicOperator::from_json(&op).unwrap();
}
