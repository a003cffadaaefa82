use std::path::Path;
use std::process::{Command, Output};

fn rsl(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsl")).args(args).current_dir(dir).output().expect("run rsl")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

const TOWER: &[&str] =
    &["tower", "--model", "circle", "--radius", "1", "--beta-grid", "0.5,0.4,0.3,0.2", "--object", "shadow-nerve", "--dim", "1", "--seed", "7"];

#[test]
fn tower_example_stabilizes_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = TOWER.to_vec();
    args.extend(["--out", "run1.json"]);
    let o = rsl(&args, dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("run1.json")).unwrap()).unwrap();
    assert_eq!(v["verdict"], "consistent");
    assert_eq!(v["towers"][0]["report"]["plateau"][1]["rank"], 1);
    // Only the report is left behind: the temporary file was renamed.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn increasing_grid_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = rsl(&["tower", "--beta-grid", "0.2,0.5"], dir.path());
    assert_eq!(code(&o), 64);
    assert!(String::from_utf8_lossy(&o.stderr).contains("decreasing"));
}

#[test]
fn malformed_invocations_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&rsl(&["tower", "--beta-grid", "x,y"], dir.path())), 64);
    assert_eq!(code(&rsl(&["no-such-command"], dir.path())), 64);
    assert_eq!(code(&rsl(&["project-check", "--beta", "0.4"], dir.path())), 64);
    std::fs::write(dir.path().join("c.json"), "{\"beta-grid\": [0.5, 0.4], \"bogus\": 1}").unwrap();
    assert_eq!(code(&rsl(&["tower", "--config", "c.json"], dir.path())), 64);
    std::fs::write(dir.path().join("c.json"), "{\"command\": \"reconstruct\"}").unwrap();
    assert_eq!(code(&rsl(&["tower", "--config", "c.json"], dir.path())), 64);
    assert_eq!(code(&rsl(&["--help"], dir.path())), 0);
}

#[test]
fn reconstruct_example_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = rsl(
        &["reconstruct", "--model", "circle", "--tau", "0.02", "--zeta", "0.05", "--beta", "0.2", "--n", "126", "--seed", "7"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["checks"]["simple"], true);
    assert_eq!(v["checks"]["in_shadow"], true);
}

#[test]
fn failed_hypothesis_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = TOWER.to_vec();
    args.extend(["--delta", "0.5", "--out", "r.json"]);
    let o = rsl(&args, dir.path());
    assert_eq!(code(&o), 2);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(v["verdict"], "out-of-regime");
    // A report without towers still plots, as a header-only stage table.
    let o = rsl(&["plot-data", "--report", "r.json", "--out-dir", "plots"], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(dir.path().join("plots/stages.csv")).unwrap(), "stage,beta,n,rank_m\n");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.json"),
        "{\"command\": \"tower\", \"beta-grid\": [0.5, 0.4, 0.3, 0.2], \"seed\": 3, \"object\": \"rips\"}",
    )
    .unwrap();
    let o = rsl(&["tower", "--config", "c.json", "--seed", "9"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["spec"]["seed"], 9);
    assert_eq!(v["spec"]["object"], "rips");
}

#[test]
fn model_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("m.json"),
        "{\"kind\": \"circle\", \"params\": {\"center\": [0, 0], \"radius\": 1}, \"overrides\": {\"tube_radius\": 0.1}}",
    )
    .unwrap();
    let o = rsl(&["tower", "--model-file", "m.json", "--beta-grid", "0.5,0.4,0.3,0.2"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a.json", "b.json"] {
        let mut args = TOWER.to_vec();
        args.extend(["--out", out]);
        assert_eq!(code(&rsl(&args, dir.path())), 0);
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.json")).unwrap());
    // The thread count does not change the output.
    let mut args = TOWER.to_vec();
    args.extend(["--out", "c.json"]);
    let o = Command::new(env!("CARGO_BIN_EXE_rsl")).args(&args).env("RSL_THREADS", "1").current_dir(dir.path()).output().unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(a, std::fs::read(dir.path().join("c.json")).unwrap());
}

#[test]
fn plot_data_tables() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = TOWER.to_vec();
    args.extend(["--out", "t.json"]);
    assert_eq!(code(&rsl(&args, dir.path())), 0);
    assert_eq!(code(&rsl(&["plot-data", "--report", "t.json", "--out-dir", "p"], dir.path())), 0);
    let stages = std::fs::read_to_string(dir.path().join("p/stages.csv")).unwrap();
    let lines: Vec<&str> = stages.lines().collect();
    assert_eq!(lines[0], "stage,beta,n,rank_m");
    assert_eq!(lines[1], "0,0.5,40,1");
    assert_eq!(lines.len(), 5);
    let o = rsl(
        &["reconstruct", "--tau", "0.02", "--zeta", "0.05", "--beta", "0.2", "--n", "126", "--seed", "7", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    assert_eq!(code(&rsl(&["plot-data", "--report", "r.json", "--out-dir", "p"], dir.path())), 0);
    let curve = std::fs::read_to_string(dir.path().join("p/curve.csv")).unwrap();
    assert!(curve.starts_with("index,x,y\n"));
    assert_eq!(curve.lines().count(), 127);
}

#[test]
fn plot_data_names_the_missing_field() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"experiment\": \"tower\"}").unwrap();
    let o = rsl(&["plot-data", "--report", "bad.json", "--out-dir", "p"], dir.path());
    assert_ne!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing field"));
}

#[test]
fn sample_rips_homology_chain() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&rsl(&["sample", "--n", "30", "--seed", "1", "--out", "s.csv"], dir.path())), 0);
    let o = rsl(&["rips", "--input", "s.csv", "--beta", "0.5", "--out", "r.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(v["betti"], serde_json::json!([1, 1]));
    std::fs::write(dir.path().join("k.json"), serde_json::to_vec(&v["complex"]).unwrap()).unwrap();
    let o = rsl(&["homology", "--complex", "k.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let h: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(h["betti"], serde_json::json!([1, 1]));
    let o = rsl(&["shadow", "--input", "s.csv", "--beta", "0.5", "--raster", "128"], dir.path());
    let s: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(s["raster_agrees"], true);
}

#[test]
fn hidden_oracle_command_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let o = rsl(&["oracle", "--instances", "10", "--resolution", "16", "--seed", "2"], dir.path());
    assert_eq!(code(&o), 0);
    let help = rsl(&["--help"], dir.path());
    assert!(!String::from_utf8_lossy(&help.stdout).contains("oracle"));
}
