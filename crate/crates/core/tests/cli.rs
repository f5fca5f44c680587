use std::path::Path;
use std::process::Command;

use wsn_route::topology::fixtures;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wsn-route"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "uvoid.txt", &fixtures::uvoid().to_text());
    let cfg = write(
        dir.path(),
        "run.cfg",
        "node_file = uvoid.txt\nprotocols = gf,gpsr,hgr\npairs = 0:7\nanchors_k = 2\n",
    );
    let out = dir.path().join("out");
    let status = bin()
        .arg("run")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    for f in ["packets.csv", "summary.csv", "anomaly.csv", "meta.txt"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let packets = std::fs::read_to_string(out.join("packets.csv")).unwrap();
    assert_eq!(packets.lines().count(), 4);
    assert!(packets.contains(",gf,0,0,7,false,0,7,no_progress,0:greedy_geo\n"));
    let stdout = String::from_utf8(status.stdout).unwrap();
    assert!(stdout.starts_with("axis,value,seed,protocol,"));
}

#[test]
fn sweep_with_no_values_prints_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.cfg", "n = 30\nfield_w = 200\nfield_h = 200\nradio_range = 80\n");
    let out = bin()
        .args(["sweep", cfg.to_str().unwrap(), "--axis", "error", "--values", "", "--out"])
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}

#[test]
fn sweep_over_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.cfg",
        "n = 30\nfield_w = 200\nfield_h = 200\nradio_range = 80\nprotocols = gpsr,hgr\npairs = 20\n",
    );
    let out = bin()
        .args(["sweep", cfg.to_str().unwrap(), "--axis", "error", "--values", "0,0.1,0.2,0.4", "--seeds", "2", "--out"])
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1 + 16);
}

#[test]
fn anomaly_command_prints_report() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "arms.txt", &fixtures::twoarms().to_text());
    let cfg = write(dir.path(), "a.cfg", "node_file = arms.txt\nanchors_k = 2\n");
    let out = bin()
        .arg("anomaly")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("zones_total = 3"));
    assert!(text.contains("zones_disconnected = 3"));
}

#[test]
fn bad_config_fails_with_the_field_name() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "protocols = gf,hgx\n");
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("`protocol`"));
}
