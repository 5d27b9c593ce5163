use std::path::Path;
use std::process::{Command, Output};

use gff::config::{ExperimentConfig, Preset};
use gff::container::FieldContainer;

fn gff(args: &[&str]) -> Output {
    gff_in(Path::new("."), args)
}

fn gff_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gff")).args(args).current_dir(dir).env_remove("GFF_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn kernels_examples() {
    let o = gff(&["kernels", "--nu", "3", "--p", "1", "--t", "1", "--s", "1", "--dist", "0"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0][..8], ["nu", "p", "t", "s", "dist", "value", "method", "est_error"]);
    let g: f64 = rows[1][5].parse().unwrap();
    let want = (-1f64).exp() / (4.0 * std::f64::consts::PI * 1f64.sinh());
    assert!((g / want - 1.0).abs() < 1e-12);

    let o = gff(&["kernels", "--nu", "3", "--p", "1", "--dist", "1", "--t", "0.3", "--s", "0.3"]);
    let rows = csv_rows(&stdout(&o));
    let v: f64 = rows[1][5].parse().unwrap();
    assert!((v / ((-1f64).exp() / (4.0 * std::f64::consts::PI)) - 1.0).abs() < 1e-12);
    assert_eq!(rows[1][6], "closed_disjoint");
}

#[test]
fn kernels_ranges_and_formatting() {
    let o = gff(&["kernels", "--nu", "4", "--t", "0.2:0.6:3", "--s", "0.5", "--dist", "0:0.4:2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1 + 3 * 2);
    for r in &rows[1..] {
        // 17 significant digits
        let mant = r[5].split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mant.chars().filter(char::is_ascii_digit).count(), 17, "{}", r[5]);
        let t: f64 = r[2].parse().unwrap();
        assert!([0.2, 0.4, 0.6].iter().any(|x| (x - t).abs() < 1e-15));
    }
}

#[test]
fn exit_codes() {
    assert_eq!(gff(&["kernels", "--p", "1", "--t", "1"]).status.code(), Some(2));
    assert_eq!(gff(&["kernels", "--nu", "3", "--t", "0.5:0.1:3"]).status.code(), Some(2));
    // t outside (0, 1]
    assert_eq!(gff(&["kernels", "--nu", "3", "--t", "1.5"]).status.code(), Some(2));
    assert_eq!(gff(&["kernels", "--nu", "2", "--t", "0.5"]).status.code(), Some(2));
    assert_eq!(gff(&["verify", "nonsense"]).status.code(), Some(2));
    // a layout above the point limit
    let o = gff(&["detect", "--replicas", "1", "--max-points", "10"]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    // quadrature that cannot meet its tolerance
    let o = gff(&["kernels", "--nu", "5", "--p", "2", "--t", "1", "--s", "0.001", "--dist", "0.5", "--quad-max-subdiv", "2"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_reports_json() {
    let o = gff(&["verify", "specfun"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["suite"], "specfun");
    assert_eq!(v["pass"], true);
    let w = &v["checks"][0];
    assert_eq!(w["name"], "wronskian_relative");
    assert!(w["measured"].as_f64().unwrap() < 1e-11);

    let o = gff(&["verify", "covariance", "--nu", "3", "--cases", "200", "--tol", "1e-6"]);
    assert!(o.status.success());

    // an unattainable tolerance fails with status 1 and still prints the verdict
    let o = gff(&["verify", "specfun", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn sample_writes_container_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = gff_in(dir.path(), &["sample", "--nu", "3", "--seq", "geometric:0.5,2", "--levels", "4", "--grid", "8", "--seed", "42", "--replicas", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("gff-out");
    let c = FieldContainer::from_bytes(&std::fs::read(out.join("field.gffs")).unwrap()).unwrap();
    assert_eq!(c.header.levels.len(), 4);
    assert_eq!((c.header.nu, c.header.p, c.header.seed, c.header.replicas), (3, 1, 42, 2));
    assert_eq!(c.header.levels[1].radius, 0.25);
    assert_eq!(c.header.levels[3].centers, 512);
    let side: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("field.json")).unwrap()).unwrap();
    assert_eq!(side["layout"]["row_len"].as_u64().unwrap() as usize, c.row_len);
    assert_eq!(side["sequence"]["radii"][3].as_f64().unwrap(), 0.5f64.powi(8));
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 42);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);
    // the level-0 value is the unit-sphere average: variance G(1)
    assert!(c.values.iter().all(|v| v.is_finite()));
}

#[test]
fn detect_example_and_json() {
    let o = gff(&["detect", "--gamma", "1.5", "--replicas", "100"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["total_flagged"], 0);
    assert_eq!(v["mode"], "limsup");
    assert_eq!(v["replicas"], 100);
    assert!((v["threshold"].as_f64().unwrap() - 3.0).abs() < 1e-15);

    let o = gff(&["detect", "--gamma", "0.25", "--replicas", "20", "--mode", "sequential"]);
    assert!(o.status.success());
    let seq: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let o = gff(&["detect", "--gamma", "0.25", "--replicas", "20"]);
    let lim: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(seq["total_flagged"].as_u64() <= lim["total_flagged"].as_u64());
}

#[test]
fn dimension_example() {
    let o = gff(&["dimension", "--gamma", "0", "--replicas", "20"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["gamma", "estimate", "ci", "replicas"]);
    let est: f64 = rows[1][1].parse().unwrap();
    assert!((est - 3.0).abs() <= 0.3, "{est}");
    assert_eq!(rows[1][3], "20");
}

#[test]
fn measure_csv() {
    let o = gff(&["measure", "--replicas", "10", "--level", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["replica", "n", "mass", "I_alpha", "pass_certificate"]);
    assert_eq!(rows.len(), 11);
    for r in &rows[1..] {
        assert_eq!(r[1], "2");
        let mass: f64 = r[2].parse().unwrap();
        let e: f64 = r[3].parse().unwrap();
        assert!(mass >= 0.0 && e >= 0.0);
        // energy of a nonzero measure is at least its squared mass times diam^-alpha
        if mass > 0.0 {
            assert!(e >= mass * mass * (2.0 * 3f64.sqrt()).powf(-1.2) * 0.99);
        }
    }
    assert_eq!(gff(&["measure", "--replicas", "2", "--level", "9"]).status.code(), Some(2));
}

#[test]
fn config_file_with_overrides_and_deterministic_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::preset(Preset::Dimension);
    cfg.sampling.replicas = 5;
    cfg.thick.gamma = 0.25;
    let path = dir.path().join("exp.json");
    std::fs::write(&path, cfg.to_json()).unwrap();
    let p = path.to_str().unwrap();
    let a = gff(&["dimension", "--config", p]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let rows = csv_rows(&stdout(&a));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][0].parse::<f64>().unwrap(), 0.25);
    assert_eq!(rows[1][3], "5");
    let b = gff(&["dimension", "--config", p, "--replicas", "7", "--threads", "2"]);
    assert_eq!(csv_rows(&stdout(&b))[1][3], "7");

    // identical runs into directories: identical files and manifest hashes
    let run = |sub: &str, threads: &str| {
        let out = dir.path().join(sub);
        let o = Command::new(env!("CARGO_BIN_EXE_gff"))
            .args(["dimension", "--config", p, "--out", out.to_str().unwrap()])
            .env("GFF_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success());
        let m: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
        (std::fs::read(out.join("dimension.csv")).unwrap(), m)
    };
    let (c1, m1) = run("one", "1");
    let (c2, m2) = run("two", "2");
    assert_eq!(c1, c2);
    assert_eq!(m1["manifest_hash"], m2["manifest_hash"]);
    assert_eq!(m1["config_hash"], m2["config_hash"]);

    std::fs::write(&path, r#"{"config_version": 1}"#).unwrap();
    assert_eq!(gff(&["dimension", "--config", p]).status.code(), Some(2));
    assert_eq!(gff(&["dimension", "--seq", "spiral"]).status.code(), Some(2));
}

#[test]
fn bad_thread_env_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_gff")).args(["verify", "specfun"]).env("GFF_THREADS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
