use std::path::Path;
use std::process::Command;

fn mrt(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_mrt")).args(args).output().expect("spawn mrt");
    assert!(
        out.status.success(),
        "mrt {args:?} failed\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 stdout")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn stage_by_stage_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    mrt(&["project", "--phantom", "smooth", "--M", "45", "--K", "64", "--out", s(d)]);
    let sino = d.join("sinogram.mrt");
    assert!(sino.exists());

    let fold_dir = d.join("fold");
    mrt(&["fold", "--sinogram", s(&sino), "--lambda", "0.1", "--delta", "0", "--out", s(&fold_dir)]);
    let folded = fold_dir.join("folded.mrt");

    for method in ["lmu", "lmu+", "us"] {
        let out = d.join(method);
        mrt(&["unfold", method, "--sinogram", s(&folded), "--out", s(&out)]);
        assert!(out.join("unfolded.mrt").exists());
    }

    let rec = d.join("rec");
    mrt(&[
        "reconstruct", "--sinogram", s(&folded), "--method", "lmu-fbp", "--size", "48x40", "--out", s(&rec),
    ]);
    let recon = rec.join("reconstruction.img");
    let pgm = std::fs::read(rec.join("reconstruction.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n48 40\n255\n"));

    let ph = d.join("ph");
    mrt(&["phantom", "--phantom", "smooth", "--size", "48x40", "--out", s(&ph)]);
    let m = d.join("m");
    let text = mrt(&["metrics", s(&ph.join("phantom.img")), s(&recon), "--out", s(&m)]);
    assert!(text.lines().any(|l| l.starts_with("ssim=")), "{text}");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(m.join("metrics.json")).unwrap()).unwrap();
    assert!(json["ssim"].as_f64().unwrap() > 0.5);

    let r = d.join("r");
    mrt(&["render", s(&folded), "--out", s(&r)]);
    assert!(r.join("folded.pgm").exists());
}

#[test]
fn experiment_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = d.join("exp.toml");
    std::fs::write(&cfg, "M = 30\nK = 48\nlambda = 0.1\nwidth = 32\nheight = 32\n").unwrap();
    let out = d.join("out");
    mrt(&["experiment", "--config", s(&cfg), "--method", "us-fbp", "--seed", "3", "--out", s(&out)]);
    for name in ["truth.img", "folded.mrt", "noisy.mrt", "unfolded.mrt", "reconstruction.pgm", "metrics.txt"] {
        assert!(out.join(name).exists(), "missing {name}");
    }
    let metrics = std::fs::read_to_string(out.join("metrics.txt")).unwrap();
    assert!(metrics.contains("method=us-fbp"), "{metrics}");
    assert!(metrics.contains("seed=3"), "{metrics}");
}

#[test]
fn bad_input_reports_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_mrt"))
        .args(["unfold", "lmu", "--sinogram", "/nonexistent/file.mrt"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonexistent"));
}

#[test]
fn rejects_malformed_size() {
    let out = Command::new(env!("CARGO_BIN_EXE_mrt"))
        .args(["phantom", "--size", "12by4"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
