use spect_mb::io::{read_csv, read_image, read_json, read_sinogram, RunManifest};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spect-mb")).current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn phantom_writes_spec_images_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["phantom", "radial", "--c", "1", "--f1", "1", "--f2", "1.4", "--m", "32", "-o", "ph"]);
    for f in ["radial.json", "radial_a.bin", "radial_f.bin", "radial_a.pgm", "radial_f.pgm", "radial.manifest.json"] {
        assert!(dir.path().join("ph").join(f).is_file(), "missing {f}");
    }
    let a = read_image(&dir.path().join("ph/radial_a.bin")).unwrap();
    assert_eq!(a.m(), 32);
    assert_eq!(a.get(16, 16), 1.0);
    let m: RunManifest = read_json(&dir.path().join("ph/radial.manifest.json")).unwrap();
    assert_eq!(m.command, "phantom");
    assert_eq!(m.outputs.len(), 5);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["phantom", "radial", "--f1", "1", "--f2", "1.4"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["phantom", "radial", "--c", "1", "--f1", "1", "--f2", "1"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["reconstruct", "--data", "missing.bin"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["analyze", "cancel-solve", "--family", "radial", "--c", "1"]).status.code(), Some(2));
}

#[test]
fn geometric_failures_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["phantom", "radial", "--c", "1", "--f1", "1", "--f2", "1.4", "--m", "8", "-o", "."]);
    let out = run(dir.path(), &["analyze", "tangent-j", "--phantom", "radial.json", "--x", "0,0.1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside"));
}

#[test]
fn noisy_projection_is_reproducible_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(p, &["phantom", "radial", "--c", "1", "--f1", "1", "--f2", "1.4", "--m", "8", "-o", "."]);
    let base = ["project", "--phantom", "radial.json", "--noise", "0.05"];
    ok(p, &[&base[..], &["--seed", "4", "-o", "d1.bin"]].concat());
    ok(p, &[&base[..], &["--seed", "4", "-o", "d2.bin"]].concat());
    ok(p, &[&base[..], &["--seed", "5", "-o", "d3.bin"]].concat());
    let d1 = fs::read(p.join("d1.bin")).unwrap();
    assert_eq!(d1, fs::read(p.join("d2.bin")).unwrap());
    assert_ne!(d1, fs::read(p.join("d3.bin")).unwrap());
    let s = read_sinogram(&p.join("d1.bin")).unwrap();
    assert_eq!((s.n_angles(), s.n_offsets()), (60, 129));
    let m: RunManifest = read_json(&p.join("d1.bin.manifest.json")).unwrap();
    assert_eq!(m.seed, Some(4));
}

#[test]
fn exact_and_grid_projections_agree_away_from_tangencies() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(p, &["phantom", "radial", "--c", "1", "--f1", "1", "--f2", "1.4", "--m", "8", "-o", "."]);
    ok(p, &["project", "--phantom", "radial.json", "--exact", "-o", "exact.bin"]);
    ok(p, &["project", "--phantom", "radial.json", "--grid", "--m", "512", "-o", "grid.bin"]);
    let e = read_sinogram(&p.join("exact.bin")).unwrap();
    let g = read_sinogram(&p.join("grid.bin")).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..e.n_angles() {
        for (j, &s) in e.offsets().iter().enumerate() {
            let near_tangent = [0.5, 0.8].iter().any(|r| (s.abs() - r).abs() < 0.05);
            if near_tangent || s.abs() > 0.8 {
                continue;
            }
            worst = worst.max((g.get(i, j) - e.get(i, j)).abs() / e.get(i, j).abs());
        }
    }
    assert!(worst < 1e-2, "worst relative difference {worst}");
}

#[test]
fn analysis_commands_reproduce_known_values() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let out = ok(p, &["analyze", "cancel-solve", "--family", "radial", "--c", "1", "--f1", "1"]);
    let root: f64 = out.lines().next().unwrap().trim_start_matches("f2 = ").parse().unwrap();
    assert!((root - 1.6245).abs() < 1e-3);

    ok(p, &["phantom", "square", "--c", "1", "--f1", "0.3", "--f2", "1", "--m", "8", "-o", "."]);
    ok(p, &["analyze", "edge-scan", "--phantom", "square.json", "--point", "0,-0.5"]);
    let scan: serde_json::Value = read_json(&p.join("edge_scan.json")).unwrap();
    let betas: Vec<f64> = serde_json::from_value(scan["beta_points"].clone()).unwrap();
    assert_eq!(betas.len(), 2);
    assert!((betas[0] - 0.5).abs() <= 0.01 && betas[1].abs() <= 0.01);

    ok(p, &["analyze", "sweep", "--phantom", "square.json", "--x", "0,-0.8", "--range", "0.5,2.5", "--n", "50"]);
    let (header, rows) = read_csv(&p.join("sweep.csv")).unwrap();
    assert_eq!(header, ["omega", "value", "d_omega"]);
    assert_eq!(rows.len(), 50);
}

#[test]
fn reconstruct_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(p, &["phantom", "radial", "--c", "1", "--f1", "1", "--f2", "1.4", "--m", "8", "-o", "."]);
    ok(p, &["project", "--phantom", "radial.json", "--angles", "12", "--offsets", "25", "-o", "d.bin"]);
    ok(p, &["--threads", "1", "reconstruct", "--data", "d.bin", "--m", "12", "--max-outer", "2", "--alpha", "0", "-o", "rec"]);
    for f in ["a.bin", "f.bin", "a_multibang.bin", "a.pgm", "report.json", "objective_trace.csv", "objective.json", "manifest.json"] {
        assert!(p.join("rec").join(f).is_file(), "missing {f}");
    }
    let terms: serde_json::Value = read_json(&p.join("rec/objective.json")).unwrap();
    assert!(terms.get("multibang").is_none());
    let (_, trace) = read_csv(&p.join("rec/objective_trace.csv")).unwrap();
    assert!(trace.windows(2).all(|w| w[1][1] <= w[0][1] * (1.0 + 1e-8)));
    let m: RunManifest = read_json(&p.join("rec/manifest.json")).unwrap();
    assert_eq!(m.config["solver"]["alpha"], 0.0);
}
