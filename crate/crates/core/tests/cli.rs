use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stiff-pressure-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn data_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    lines.next();
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn zero_nu_is_rejected_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "model.m = 20\nmodel.nu = 0\n");
    let out = lab(&["simulate-pme", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("nu must be > 0 (ν=0 case not treated)"), "{err}");
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn empty_config_names_missing_section() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = lab(&["converge", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing section: model"));
}

#[test]
fn unknown_command_is_a_usage_error() {
    let out = lab(&["simulate-everything", "--config", "x.cfg"]);
    assert!(!out.status.success());
}

#[test]
fn vacuum_pme_snapshots_are_flat() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "model.m = 20\nmodel.nu = 0.5\ngrid.n_cells = 50\ninitial.preset = vacuum\n\
         stepping.t_end = 0.1\nstepping.snapshots = 2\noutput.formats = csv, svg\n",
    );
    let out_dir = dir.path().join("out");
    let out = lab(&["simulate-pme", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = out_dir.join("snapshot_t0.100000.csv");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# stiff-pressure-lab schema v1\n"));
    assert!(data_rows(&csv).iter().all(|r| r[1].parse::<f64>().unwrap() == 0.0));
    let svg = std::fs::read_to_string(out_dir.join("snapshot_t0.100000.svg")).unwrap();
    assert!(svg.contains("stroke-dasharray") && !svg.contains("href"));
}

#[test]
fn vacuum_limit_boundary_file_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "model.m = 20\nmodel.nu = 0.5\ngrid.n_cells = 50\ninitial.preset = vacuum\n\
         stepping.dt = 1e-2\nstepping.t_end = 0.1\nstepping.snapshots = 2\n",
    );
    let out_dir = dir.path().join("out");
    let out = lab(&["simulate-limit", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows = data_rows(&out_dir.join("free_boundary.csv"));
    assert!(rows.iter().all(|r| r[1] == "0" && r[2].is_empty()), "{rows:?}");
}

#[test]
fn merging_preset_boundary_count_drops_from_four_to_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&[
        "simulate-limit",
        "--config",
        configs().join("merging.cfg").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let counts: Vec<usize> = data_rows(&dir.path().join("free_boundary.csv"))
        .iter()
        .map(|r| r[1].parse().unwrap())
        .collect();
    assert_eq!(counts.first(), Some(&4));
    assert_eq!(counts.last(), Some(&2));
    assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{counts:?}");
}

#[test]
fn nucleation_preset_jumps_after_hitting_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&[
        "simulate-limit",
        "--config",
        configs().join("nucleation.cfg").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let t_star = 1.25f64.ln();
    for r in data_rows(&dir.path().join("free_boundary.csv")) {
        let t: f64 = r[0].parse().unwrap();
        if t < t_star - 1e-3 {
            assert_eq!(r[1], "0", "boundary before t* at {t}");
        }
    }
    let jumps = data_rows(&dir.path().join("jumps.csv"));
    assert!(!jumps.is_empty());
    let t_after: f64 = jumps[0][1].parse().unwrap();
    assert!((t_after - t_star).abs() < 2e-3, "{t_after}");
}

#[test]
fn failing_barrier_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "model.m = 100\nmodel.nu = 0.5\nbarrier.kind = sub\nbarrier.m = 100\nbarrier.a0 = 0\n",
    );
    let out = lab(&["barrier-check", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn lemma_check_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "model.m = 20\nmodel.nu = 0.5\nlemma.checks = comparison\nlemma.n_trials = 2\n",
    );
    let run = |seed: &str, sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = lab(&[
            "lemma-check",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(out_dir.join("lemma_comparison.csv")).unwrap()
    };
    assert_eq!(run("5", "a"), run("5", "b"));
    assert_ne!(run("5", "a"), run("6", "c"));
}
