use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use freqsweep::io::{self, SweepConfig};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn freqsweep(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_freqsweep"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn run_ok(args: &[&str]) {
    let (code, stderr) = freqsweep(args);
    assert_eq!(code, 0, "{args:?}: {stderr}");
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn write_config(dir: &Path, name: &str, config: &SweepConfig) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, io::to_json_string(config)).unwrap();
    p
}

#[test]
fn rod_fsm_sweep_uses_110_solves() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("nested/fsm");
    run_ok(&[
        "sweep-fsm",
        "--system",
        path(&fixture("rod.json")),
        "--config",
        path(&fixture("rod_sweep.json")),
        "--out",
        path(&out),
    ]);
    let r = report(&out);
    assert_eq!(r["n_c"], 110);
    assert_eq!(r["converged"], true);
    let time = fs::read_to_string(out.join("time.csv")).unwrap();
    assert_eq!(time.lines().count(), 218 + 1);
    let spectrum = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert_eq!(spectrum.lines().count(), 110 * 7 + 1);
}

#[test]
fn odd_sample_count_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "odd.json", &SweepConfig::new(2.0, 129));
    let (code, stderr) = freqsweep(&[
        "sweep-fsm",
        "--system",
        path(&fixture("modal.json")),
        "--config",
        path(&config),
        "--out",
        path(&tmp.path().join("o")),
    ]);
    assert_eq!(code, 3, "{stderr}");
    assert!(!tmp.path().join("o/report.json").exists());
}

#[test]
fn modal_fsm_time_rows_match_grid() {
    let tmp = tempfile::tempdir().unwrap();
    for samples in [64, 100, 256] {
        let config = write_config(tmp.path(), "c.json", &SweepConfig::new(2.0, samples));
        let out = tmp.path().join(format!("o{samples}"));
        run_ok(&[
            "sweep-fsm",
            "--system",
            path(&fixture("modal.json")),
            "--config",
            path(&config),
            "--out",
            path(&out),
        ]);
        let series =
            io::parse_timeseries_csv(&fs::read_to_string(out.join("time.csv")).unwrap()).unwrap();
        assert_eq!(series.len(), samples);
        assert_eq!(series.labels(), ["dof0", "dof1", "dof2", "dof3"]);
    }
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(freqsweep(&[]).0, 2);
    assert_eq!(freqsweep(&["sweep-fsm", "--system", "x.json"]).0, 2);
    assert_eq!(
        freqsweep(&[
            "sweep-afs",
            "--system",
            path(&fixture("modal.json")),
            "--out",
            "/tmp/never"
        ])
        .0,
        2
    );
}

#[test]
fn missing_input_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, _) = freqsweep(&[
        "sweep-fsm",
        "--system",
        path(&tmp.path().join("absent.json")),
        "--config",
        path(&fixture("modal_sweep.json")),
        "--out",
        path(tmp.path()),
    ]);
    assert_eq!(code, 1);
}

#[test]
fn infinite_thresholds_stop_after_validation() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = SweepConfig::new(2.0, 128);
    config.afs.e1_threshold = f64::INFINITY;
    config.afs.e2_threshold = f64::INFINITY;
    let config = write_config(tmp.path(), "inf.json", &config);
    let out = tmp.path().join("afs");
    run_ok(&[
        "sweep-afs",
        "--system",
        path(&fixture("modal.json")),
        "--config",
        path(&config),
        "--out",
        path(&out),
        "--orf",
        "0,1",
        "--test",
        "2,3",
    ]);
    let r = report(&out);
    assert_eq!(r["converged"], true);
    assert_eq!(r["n_c"], 16 + 3);
    assert_eq!(r["orf"], serde_json::json!([0, 1]));
    assert_eq!(r["history"][0]["e1"], "inf");
}

#[test]
fn fixed_seed_gives_identical_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for run in 0..2 {
        let out = tmp.path().join(format!("run{run}"));
        run_ok(&[
            "sweep-afs",
            "--system",
            path(&fixture("modal.json")),
            "--config",
            path(&fixture("modal_sweep.json")),
            "--out",
            path(&out),
            "--seed",
            "7",
        ]);
        bytes.push(fs::read(out.join("report.json")).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    let r: Value = serde_json::from_slice(&bytes[0]).unwrap();
    assert_eq!(r["converged"], true);
    assert_eq!(r["orf"].as_array().unwrap().len(), 2);
    let files: Vec<&str> = r["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["file"].as_str().unwrap())
        .collect();
    assert_eq!(
        files,
        ["archive.json", "spectrum.csv", "model.json", "time.csv"]
    );
}

#[test]
fn report_hashes_match_outputs() {
    use sha2::{Digest, Sha256};
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("afs");
    run_ok(&[
        "sweep-afs",
        "--system",
        path(&fixture("modal.json")),
        "--config",
        path(&fixture("modal_sweep.json")),
        "--out",
        path(&out),
    ]);
    for entry in report(&out)["outputs"].as_array().unwrap() {
        let bytes = fs::read(out.join(entry["file"].as_str().unwrap())).unwrap();
        assert_eq!(entry["sha256"], hex::encode(Sha256::digest(&bytes)));
        assert_eq!(entry["bytes"], bytes.len());
    }
}

#[test]
fn rod_comparison_halves_the_solves() {
    let tmp = tempfile::tempdir().unwrap();
    let (fsm, afs, cmp) = (
        tmp.path().join("fsm"),
        tmp.path().join("afs"),
        tmp.path().join("cmp"),
    );
    let system = fixture("rod.json");
    let config = fixture("rod_sweep.json");
    run_ok(&[
        "sweep-fsm",
        "--system",
        path(&system),
        "--config",
        path(&config),
        "--out",
        path(&fsm),
    ]);
    run_ok(&[
        "sweep-afs",
        "--system",
        path(&system),
        "--config",
        path(&config),
        "--out",
        path(&afs),
    ]);
    let r = report(&afs);
    assert_eq!(r["converged"], true);
    assert!(r["n_c"].as_u64().unwrap() <= 55);
    run_ok(&[
        "compare",
        "--fsm",
        path(&fsm),
        "--afs",
        path(&afs),
        "--reference",
        path(&system),
        "--out",
        path(&cmp),
    ]);
    let c: Value =
        serde_json::from_str(&fs::read_to_string(cmp.join("comparison.json")).unwrap()).unwrap();
    assert!(c["nc_ratio"].as_f64().unwrap() >= 2.0);
    assert_eq!(c["horizon"]["fraction_of_period"], 0.9);
    let tip = &c["channels"][0];
    assert_eq!(tip["label"], "p1_disp_z3");
    assert!(tip["afs_rms_vs_reference"].as_f64().unwrap() <= 0.05);
}

#[test]
fn identical_runs_compare_to_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let (fsm, cmp) = (tmp.path().join("fsm"), tmp.path().join("cmp"));
    run_ok(&[
        "sweep-fsm",
        "--system",
        path(&fixture("modal.json")),
        "--config",
        path(&fixture("modal_sweep.json")),
        "--out",
        path(&fsm),
    ]);
    run_ok(&[
        "compare",
        "--fsm",
        path(&fsm),
        "--afs",
        path(&fsm),
        "--out",
        path(&cmp),
    ]);
    let c: Value =
        serde_json::from_str(&fs::read_to_string(cmp.join("comparison.json")).unwrap()).unwrap();
    assert_eq!(c["nc_ratio"], 1.0);
    for ch in c["channels"].as_array().unwrap() {
        assert_eq!(ch["rms_diff"], 0.0);
        assert_eq!(ch["rms_diff_rel"], 0.0);
        assert!(ch["afs_rms_vs_reference"].is_null());
    }
}

#[test]
fn mismatched_period_is_a_grid_error() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let other = write_config(tmp.path(), "c.json", &SweepConfig::new(2.5, 128));
    run_ok(&[
        "sweep-fsm",
        "--system",
        path(&fixture("modal.json")),
        "--config",
        path(&fixture("modal_sweep.json")),
        "--out",
        path(&a),
    ]);
    run_ok(&[
        "sweep-fsm",
        "--system",
        path(&fixture("modal.json")),
        "--config",
        path(&other),
        "--out",
        path(&b),
    ]);
    let (code, stderr) = freqsweep(&[
        "compare",
        "--fsm",
        path(&a),
        "--afs",
        path(&b),
        "--out",
        path(&tmp.path().join("c")),
    ]);
    assert_eq!(code, 3);
    assert!(stderr.contains("time grids differ"), "{stderr}");
}

#[test]
fn interrupted_sweep_resumes_to_the_same_samples() {
    let tmp = tempfile::tempdir().unwrap();
    let system = fixture("modal.json");
    let full_config: SweepConfig = io::read_json(&fixture("modal_sweep.json")).unwrap();
    let mut short = full_config.clone();
    short.afs.max_iterations = 4;
    let short = write_config(tmp.path(), "short.json", &short);
    let (full, part, resumed) = (
        tmp.path().join("full"),
        tmp.path().join("part"),
        tmp.path().join("resumed"),
    );

    run_ok(&[
        "sweep-afs",
        "--system",
        path(&system),
        "--config",
        path(&fixture("modal_sweep.json")),
        "--out",
        path(&full),
    ]);
    let (code, stderr) = freqsweep(&[
        "sweep-afs",
        "--system",
        path(&system),
        "--config",
        path(&short),
        "--out",
        path(&part),
    ]);
    assert_eq!(code, 5, "{stderr}");
    let partial = io::load_archive(&part.join("archive.json")).unwrap();
    assert!(!partial.converged);
    assert_eq!(report(&part)["converged"], false);

    run_ok(&[
        "sweep-afs",
        "--system",
        path(&system),
        "--config",
        path(&fixture("modal_sweep.json")),
        "--resume",
        path(&part.join("archive.json")),
        "--out",
        path(&resumed),
    ]);
    let a = io::load_archive(&full.join("archive.json")).unwrap();
    let b = io::load_archive(&resumed.join("archive.json")).unwrap();
    assert_eq!(a, b);
    let (ra, rb) = (report(&full), report(&resumed));
    assert_eq!(ra["history"], rb["history"]);
    assert_eq!(
        rb["solver_calls"].as_u64().unwrap(),
        ra["n_c"].as_u64().unwrap() - partial.n_c() as u64
    );
    assert_eq!(
        fs::read(full.join("time.csv")).unwrap(),
        fs::read(resumed.join("time.csv")).unwrap()
    );
}

#[test]
fn fit_and_invert_reproduce_a_rational_system() {
    let tmp = tempfile::tempdir().unwrap();
    let (fsm, fitted, inverted, reference) = (
        tmp.path().join("fsm"),
        tmp.path().join("fit"),
        tmp.path().join("inv"),
        tmp.path().join("ref"),
    );
    let config = fixture("modal_sweep.json");
    run_ok(&[
        "sweep-fsm",
        "--system",
        path(&fixture("rational.json")),
        "--config",
        path(&config),
        "--out",
        path(&fsm),
    ]);
    let eta = report(&fsm)["eta"].as_f64().unwrap().to_string();
    run_ok(&[
        "fit",
        "--spectrum",
        path(&fsm.join("spectrum.csv")),
        "--eta",
        &eta,
        "--order",
        "3",
        "--out",
        path(&fitted),
    ]);
    let r = report(&fitted);
    assert!(r["per_channel_rms"]["h"].as_f64().unwrap() < 1e-10);

    // the fitted model and the system definition invert to the same history
    run_ok(&[
        "invert",
        "--model",
        path(&fitted.join("model.json")),
        "--config",
        path(&config),
        "--out",
        path(&inverted),
    ]);
    let mut truth: Value =
        serde_json::from_str(&fs::read_to_string(fixture("rational.json")).unwrap()).unwrap();
    truth.as_object_mut().unwrap().remove("type");
    let truth_path = tmp.path().join("truth.json");
    fs::write(&truth_path, truth.to_string()).unwrap();
    run_ok(&[
        "invert",
        "--model",
        path(&truth_path),
        "--config",
        path(&config),
        "--out",
        path(&reference),
    ]);
    let a =
        io::parse_timeseries_csv(&fs::read_to_string(inverted.join("time.csv")).unwrap()).unwrap();
    let b =
        io::parse_timeseries_csv(&fs::read_to_string(reference.join("time.csv")).unwrap()).unwrap();
    for (x, y) in a.channel(0).iter().zip(b.channel(0)) {
        assert!((x - y).abs() < 1e-8, "{x} vs {y}");
    }
    assert_eq!(report(&inverted)["inverse"], "full");
}
