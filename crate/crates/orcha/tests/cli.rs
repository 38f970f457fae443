use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn orcha(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_orcha"));
    cmd.args(args).env_remove("ORCHA_SEED").env("RUST_LOG", "off");
    if let Some(s) = seed {
        cmd.env("ORCHA_SEED", s);
    }
    cmd.output().unwrap()
}

fn render_fig2a(out: &Path, extra: &[&str], seed: Option<&str>) -> Output {
    let fx = fixture("fig2a");
    let (s, l, b) = (fx.join("streams.csv"), fx.join("links.csv"), fx.join("labels.csv"));
    let mut args = vec![
        "render",
        "--streams",
        s.to_str().unwrap(),
        "--links",
        l.to_str().unwrap(),
        "--labels",
        b.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    orcha(&args, seed)
}

#[test]
fn render_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chart.svg");
    let res = render_fig2a(&out, &[], None);
    assert!(res.status.success());
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("nodes=") && stderr.contains("edges=") && stderr.contains("ticks="), "{stderr}");
    let svg = fs::read_to_string(&out).unwrap();
    assert!(svg.starts_with("<?xml"));
}

#[test]
fn labels_are_optional() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chart.svg");
    let s = fixture("fig2a").join("streams.csv");
    let res = orcha(&["render", "--streams", s.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let svg = fs::read_to_string(&out).unwrap();
    assert_eq!(svg.matches("class=\"stream\"").count(), 3);
    assert_eq!(svg.matches("class=\"label ").count(), 0);
}

#[test]
fn invalid_parent_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let streams = dir.path().join("streams.csv");
    fs::write(&streams, "id,t0,t1,color,size,parent\nA,0,5,red,,\nB,1,3,blue,,Z\n").unwrap();
    let out = dir.path().join("chart.svg");
    let res = orcha(&["render", "--streams", streams.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert_eq!(res.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("streams row 2"), "{stderr}");
    assert!(stderr.contains("`Z`"), "{stderr}");
    assert!(!out.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1, "no temporary files left behind");
}

#[test]
fn malformed_csv_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let streams = dir.path().join("streams.csv");
    fs::write(&streams, "id,t0,t1,color,size,parent\nA,zero,5,red,,\n").unwrap();
    let out = dir.path().join("chart.svg");
    let res = orcha(&["render", "--streams", streams.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 2"));
    assert!(!out.exists());
}

#[test]
fn seed_sources() {
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str| fs::read(dir.path().join(name)).unwrap();
    let p = |name: &str| dir.path().join(name);
    assert!(render_fig2a(&p("default.svg"), &[], None).status.success());
    assert!(render_fig2a(&p("env42.svg"), &[], Some("42")).status.success());
    assert!(render_fig2a(&p("env7.svg"), &[], Some("7")).status.success());
    assert!(render_fig2a(&p("flag.svg"), &["--seed", "42"], Some("7")).status.success());
    assert_eq!(read("default.svg"), read("env42.svg"));
    assert_ne!(read("env7.svg"), read("env42.svg"));
    assert_eq!(read("flag.svg"), read("env42.svg"));
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    fs::write(&config, r#"{"canvas": {"width": 900, "height": 500}}"#).unwrap();
    let out = dir.path().join("chart.svg");
    let res = render_fig2a(&out, &["--config", config.to_str().unwrap(), "--height", "600"], None);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let svg = fs::read_to_string(&out).unwrap();
    // the axis strip sits below the chart area
    assert!(svg.contains("width=\"900.00\" height=\"628.00\""), "{}", &svg[..300]);
}
