use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chemotaxis"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", stderr(&out));
    out
}

fn rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(str::to_owned).collect())
        .collect();
    (header, rows)
}

fn footer(rows: &[Vec<String>], label: &str, column: usize) -> f64 {
    rows.iter().find(|r| r[0] == label).unwrap()[column].parse().unwrap()
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

#[test]
fn training_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (p(&dir, "a"), p(&dir, "b"));
    for out in [&a, &b] {
        ok(&["train", "--n-t", "4", "--epochs", "12", "--seed", "7", "--out-dir", out]);
    }
    for file in ["weights.json", "training_curve.csv"] {
        let x = fs::read(Path::new(&a).join(file)).unwrap();
        let y = fs::read(Path::new(&b).join(file)).unwrap();
        assert_eq!(x, y, "{file} differs between runs");
    }
    let (header, curve) = rows(&Path::new(&a).join("training_curve.csv"));
    assert_eq!(header, ["epoch", "gain", "mean_loss", "epsilon"]);
    assert_eq!(curve.len(), 12);
    assert_eq!(curve[0][3].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn zero_epochs_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out = run(&["train", "--epochs", "0", "--out-dir", &p(&dir, "o")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("nothing to train"), "{}", stderr(&out));
}

#[test]
fn window_must_be_two_four_or_eight() {
    let out = run(&["baseline", "--n-t", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_is_validated_and_overridable() {
    let dir = TempDir::new().unwrap();
    let bad = p(&dir, "bad.toml");
    fs::write(&bad, "kappa_three = 4.0\n").unwrap();
    let out = run(&["baseline", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("kappa_three"), "{}", stderr(&out));

    let good = p(&dir, "good.toml");
    fs::write(&good, "t_life = 200.0\ncells = 1\nrecording = \"actions\"\n").unwrap();
    let out_dir = p(&dir, "o");
    ok(&["baseline", "--config", &good, "--t-life", "40", "--out-dir", &out_dir]);
    let (_, traj) = rows(&Path::new(&out_dir).join("cell_000_trajectory.csv"));
    assert_eq!(traj.last().unwrap()[0].parse::<f64>().unwrap(), 40.0);

    let out = run(&["baseline", "--config", &p(&dir, "missing.toml")]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn greedy_cohort_climbs_the_gradient() {
    let dir = TempDir::new().unwrap();
    let out_dir = p(&dir, "g");
    ok(&["baseline", "--policy", "greedy", "--n-t", "2", "--cells", "40", "--out-dir", &out_dir]);
    let (header, summary) = rows(&Path::new(&out_dir).join("summary.csv"));
    assert_eq!(header, ["cell", "gain"]);
    assert_eq!(summary.len(), 42);
    assert!(footer(&summary, "mean", 1) > 0.0);
    assert!(footer(&summary, "variance", 1) >= 0.0);

    let (header, traj) = rows(&Path::new(&out_dir).join("cell_039_trajectory.csv"));
    assert_eq!(header, ["t", "x", "y", "kappa", "v", "c", "action"]);
    // Every integration step of a 200-unit lifespan, plus the start.
    assert_eq!(traj.len(), 10_001);
    assert!(traj[1][1].contains('e') && traj[1][1].len() >= 20, "{}", traj[1][1]);
    let (header, _) = rows(&Path::new(&out_dir).join("cell_000_centerline.csv"));
    assert_eq!(header, ["t", "x", "y"]);
}

#[test]
fn swinging_cell_stays_near_its_start() {
    let dir = TempDir::new().unwrap();
    let out_dir = p(&dir, "s");
    ok(&["baseline", "--policy", "swinging", "--cells", "1", "--out-dir", &out_dir]);
    let (_, summary) = rows(&Path::new(&out_dir).join("summary.csv"));
    // The centerline is a circle of radius about 1.22 for N_T = 4.
    assert!(footer(&summary, "mean", 1).abs() < 2.5);
}

#[test]
fn weight_file_errors() {
    let dir = TempDir::new().unwrap();
    let out = run(&["evaluate", "--weights", &p(&dir, "nope.json")]);
    assert_eq!(out.status.code(), Some(3));

    let corrupt = p(&dir, "corrupt.json");
    fs::write(&corrupt, "{\"format\": \"something else\"}").unwrap();
    let out = run(&["evaluate", "--weights", &corrupt]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["evaluate"]);
    assert_eq!(out.status.code(), Some(2));

    let trained = p(&dir, "t2");
    ok(&["train", "--n-t", "2", "--epochs", "2", "--out-dir", &trained]);
    let weights = format!("{trained}/weights.json");
    let out = run(&["evaluate", "--n-t", "4", "--weights", &weights, "--cells", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("is 4") && msg.contains("expects 8"), "{msg}");
}

#[test]
fn flow_aware_network_has_wide_inputs() {
    let dir = TempDir::new().unwrap();
    let out_dir = p(&dir, "f");
    ok(&["train", "--flow", "tg", "--flow-aware", "--epochs", "2", "--out-dir", &out_dir]);
    let text = fs::read_to_string(Path::new(&out_dir).join("weights.json")).unwrap();
    let net = chemotaxis::load_network::<f64>(&text).unwrap();
    assert_eq!(net.layer_sizes(), vec![20, 36, 36, 36, 2]);

    let out = run(&["train", "--flow-aware", "--epochs", "2", "--out-dir", &out_dir]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_and_reload_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let trained = p(&dir, "t");
    ok(&["train", "--epochs", "30", "--seed", "3", "--out-dir", &trained]);
    let weights = format!("{trained}/weights.json");

    let (a, b) = (p(&dir, "a"), p(&dir, "b"));
    for out in [&a, &b] {
        ok(&["compare", "--weights", &weights, "--cells", "4", "--t-life", "30", "--out-dir", out]);
    }
    let (header, first) = rows(&Path::new(&a).join("comparison.csv"));
    let (_, second) = rows(&Path::new(&b).join("comparison.csv"));
    assert_eq!(header, ["cell", "qnet", "greedy", "swinging"]);
    assert_eq!(first.len(), 6);
    assert_eq!(first, second);

    // The qnet column matches a separate evaluation of the same weights.
    let e = p(&dir, "e");
    ok(&["evaluate", "--weights", &weights, "--cells", "4", "--t-life", "30", "--out-dir", &e]);
    let (_, summary) = rows(&Path::new(&e).join("summary.csv"));
    for i in 0..4 {
        assert_eq!(summary[i][1], first[i][1]);
    }
}

#[test]
fn compare_picks_the_layout_per_network() {
    let dir = TempDir::new().unwrap();
    let (aware, blind) = (p(&dir, "aware"), p(&dir, "blind"));
    ok(&["train", "--flow", "tg", "--flow-aware", "--epochs", "2", "--out-dir", &aware]);
    ok(&["train", "--flow", "tg", "--epochs", "2", "--out-dir", &blind]);
    let out_dir = p(&dir, "c");
    let out = ok(&[
        "compare",
        "--flow",
        "tg",
        "--weights",
        &format!("{aware}/weights.json"),
        &format!("{blind}/weights.json"),
        "--cells",
        "2",
        "--t-life",
        "20",
        "--out-dir",
        &out_dir,
    ]);
    let (header, _) = rows(&Path::new(&out_dir).join("comparison.csv"));
    assert_eq!(header, ["cell", "qnet_1", "qnet_2", "greedy", "swinging"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("variance"));
}

#[test]
fn radial_evaluation_reports_source_arrivals() {
    let dir = TempDir::new().unwrap();
    let out_dir = p(&dir, "r");
    let out = ok(&[
        "baseline", "--field", "radial", "--cells", "2", "--t-life", "30", "--out-dir", &out_dir,
    ]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("reached the source"));
}
