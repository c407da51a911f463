use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use polyinv_cli::manifest::RunManifest;
use polyinv_core::{Polytope, SampleSet};
use tempfile::TempDir;

fn polyinv(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyinv"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

/// System `sys.json` (n = 2, M = 2) and samples `s.json` in a fresh directory.
fn planar_setup(count: &str) -> TempDir {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    assert_eq!(code(&polyinv(p, &["gen-system", "--n", "2", "--modes", "2", "--seed", "3", "--out", "sys.json"])), 0);
    assert_eq!(code(&polyinv(p, &["sample", "--system", "sys.json", "--N", count, "--seed", "4", "--out", "s.json"])), 0);
    dir
}

#[test]
fn gen_system_is_deterministic_and_guards_dimension() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    for out in ["a.json", "b.json"] {
        let run = polyinv(p, &["gen-system", "--n", "2", "--modes", "4", "--decay", "0.95", "--seed", "1", "--out", out]);
        assert_eq!(code(&run), 0);
        assert!(String::from_utf8_lossy(&run.stdout).contains("certified decay bound"));
    }
    assert_eq!(read(p, "a.json"), read(p, "b.json"));
    let manifest = RunManifest::load(&p.join("a.json.manifest.json")).unwrap();
    assert_eq!(manifest.command, "gen-system");
    assert_eq!(manifest.seed, Some(1));

    let run = polyinv(p, &["gen-system", "--n", "9", "--modes", "2", "--out", "c.json"]);
    assert_eq!(code(&run), 2);
    assert!(!p.join("c.json").exists());
}

#[test]
fn sample_writes_requested_pairs() {
    let dir = planar_setup("300");
    let p = dir.path();
    let set = SampleSet::load(p.join("s.json")).unwrap();
    assert_eq!(set.len(), 300);
    assert_eq!(RunManifest::load(&p.join("s.json.manifest.json")).unwrap().seed, Some(4));

    assert_eq!(code(&polyinv(p, &["sample", "--system", "sys.json", "--N", "0", "--out", "z.json"])), 2);
    assert_eq!(code(&polyinv(p, &["sample", "--system", "missing.json", "--N", "5", "--out", "z.json"])), 2);
}

#[test]
fn synthesize_is_reproducible_and_reports_nonconvergence() {
    let dir = planar_setup("500");
    let p = dir.path();
    for out in ["r1.json", "r2.json"] {
        let run = polyinv(p, &["synthesize", "--samples", "s.json", "--out", out]);
        assert_eq!(code(&run), 0);
        let stdout = String::from_utf8_lossy(&run.stdout).to_string();
        assert!(stdout.contains("iterations:") && stdout.contains("vertices:"));
    }
    assert_eq!(read(p, "r1.json"), read(p, "r2.json"));
    assert!(read(p, "r1.json.trace.csv").starts_with("k,vertices,facets,max_gauge,ms\n"));

    let run = polyinv(p, &["synthesize", "--samples", "s.json", "--max-iter", "1", "--out", "r3.json", "--trace", "t.csv"]);
    assert_eq!(code(&run), 3);
    assert!(!p.join("r3.json").exists());
    assert_eq!(read(p, "t.csv").lines().count(), 3);
}

#[test]
fn certify_modes() {
    let dir = planar_setup("500");
    let p = dir.path();
    assert_eq!(code(&polyinv(p, &["synthesize", "--samples", "s.json", "--out", "r.json"])), 0);

    let run = polyinv(p, &["certify", "--polytope", "r.json", "--mode", "scenario", "--beta", "0.001", "--samples", "s.json", "--out", "sc.json"]);
    assert_eq!(code(&run), 0);
    let cert: serde_json::Value = serde_json::from_str(&read(p, "sc.json")).unwrap();
    assert_eq!(cert["type"], "scenario");
    assert_eq!(cert["inputs"]["beta"].as_f64(), Some(0.001));

    assert_eq!(code(&polyinv(p, &["certify", "--polytope", "r.json", "--mode", "scenario", "--out", "x.json"])), 2);

    Polytope::unit_box(2).unwrap().save(p.join("box.json")).unwrap();
    let run = polyinv(p, &["certify", "--polytope", "box.json", "--mode", "scenario", "--samples", "s.json", "--out", "x.json"]);
    assert_eq!(code(&run), 2);

    let run = polyinv(p, &["certify", "--polytope", "r.json", "--mode", "contraction", "--epsilon", "0.05", "--samples", "s.json", "--out", "c.json"]);
    assert_eq!(code(&run), 0);
    let cert: serde_json::Value = serde_json::from_str(&read(p, "c.json")).unwrap();
    assert_eq!(cert["type"], "contraction");
    assert_eq!(cert["result"]["status"], "certified");
}

#[test]
fn contraction_guard_is_inconclusive_not_an_error() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    Polytope::unit_box(4).unwrap().save(p.join("cube.json")).unwrap();
    let run = polyinv(
        p,
        &["certify", "--polytope", "cube.json", "--mode", "contraction", "--epsilon", "0.4", "--N", "1000", "--modes", "2", "--out", "c.json"],
    );
    assert_eq!(code(&run), 0);
    let cert: serde_json::Value = serde_json::from_str(&read(p, "c.json")).unwrap();
    assert_eq!(cert["result"]["status"], "inconclusive");
}

#[test]
fn bench_table_records_failed_rows() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    let run = polyinv(p, &["bench-table", "--dims", "2", "--modes", "2,3", "--N", "400", "--out", "t.csv"]);
    assert_eq!(code(&run), 0);
    let csv = read(p, "t.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,M,k_tilde,V_tilde,k_star,V_star,lambda_star,ms");
    assert_eq!(lines.len(), 3);
    for line in &lines[1..] {
        let lambda: f64 = line.split(',').nth(6).unwrap().parse().unwrap();
        assert!(lambda > 0.0 && lambda <= 1.0 + 1e-9);
    }

    let run = polyinv(p, &["bench-table", "--dims", "2", "--modes", "2", "--N", "400", "--max-iter", "1", "--out", "f.csv"]);
    assert_eq!(code(&run), 0);
    assert_eq!(read(p, "f.csv").lines().nth(1), Some("2,2,,,,,,"));

    assert_eq!(code(&polyinv(p, &["bench-table", "--dims", "9", "--out", "g.csv"])), 2);
}

#[test]
fn bound_curves_csv_and_empty_grid() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    let run = polyinv(p, &["bound-curves", "--n", "2", "--modes", "2", "--N-grid", "200,400", "--out", "b.csv"]);
    assert_eq!(code(&run), 0);
    let csv = read(p, "b.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "curve,N,value");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("lambda_B,200,"));
    assert!(lines[3].starts_with("lambda_eps,200,"));

    assert_eq!(code(&polyinv(p, &["bound-curves", "--eps-grid", "", "--out", "e.csv"])), 2);
    assert_eq!(code(&polyinv(p, &["bound-curves", "--eps-grid", "0.1", "--N-grid", "100", "--out", "e.csv"])), 2);
}

#[test]
fn render_square_and_reject_space() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    Polytope::unit_box(2).unwrap().save(p.join("sq.json")).unwrap();
    Polytope::unit_box(3).unwrap().save(p.join("cube.json")).unwrap();
    for out in ["a.svg", "b.svg"] {
        assert_eq!(code(&polyinv(p, &["render", "--polytope", "sq.json", "--out", out])), 0);
    }
    let svg = read(p, "a.svg");
    assert_eq!(svg, read(p, "b.svg"));
    assert!(svg.contains(r#"version="1.1""#));
    let path = svg.lines().find(|l| l.starts_with("<path")).unwrap();
    assert_eq!(path.matches(" L").count(), 3);

    let run = polyinv(p, &["render", "--polytope", "cube.json", "--out", "c.svg"]);
    assert_eq!(code(&run), 2);
    assert!(String::from_utf8_lossy(&run.stderr).contains("planar"));
}

#[test]
fn replay_reproduces_outputs() {
    let dir = planar_setup("400");
    let p = dir.path();
    assert_eq!(code(&polyinv(p, &["synthesize", "--samples", "s.json", "--out", "r.json"])), 0);
    let before = read(p, "r.json");
    let run = polyinv(p, &["replay", "--manifest", "r.json.manifest.json"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(read(p, "r.json"), before);

    let path: PathBuf = p.join("r.json.manifest.json");
    let mut manifest = RunManifest::load(&path).unwrap();
    manifest.outputs[0].sha256 = "0".repeat(64);
    manifest.save(&path).unwrap();
    assert_eq!(code(&polyinv(p, &["replay", "--manifest", "r.json.manifest.json"])), 2);
}
