use std::process::Command;

use openphase::lindblad::{build_superoperator, DecayRates};
use openphase_cli::matrix::{format_matrix, jordan_report, DEFAULT_RANK_TOL};
use openphase_cli::table::Cell;
use openphase_cli::{run, run_propagation, FigureId, RunConfig};

const SMALL_SWEEP: &str = r#"
[schedule]
points = [
  { curve = "a", x = 0.5, gamma13 = 0.25, gamma23 = 0.5 },
  { curve = "a", x = 1.0, gamma13 = 0.5, gamma23 = 1.0 },
  { curve = "b", x = 1.0, gamma12 = 1.0, gamma21 = 0.5 },
]
[grid]
points = 300
[run]
labels = [1, 9]
threads = 2
"#;

fn float(cell: &Cell) -> f64 {
    match cell {
        Cell::Float(x) => *x,
        other => panic!("not a float: {other:?}"),
    }
}

#[test]
fn identical_configs_give_byte_identical_csv() {
    let config = RunConfig::from_toml(SMALL_SWEEP).unwrap();
    let first = run(&config).unwrap();
    let second = run(&config).unwrap();
    assert_eq!(first.csv, second.csv);
    assert_eq!(first.plot, second.plot);
    // Thread count does not change results.
    let mut serial = config.clone();
    serial.run.threads = 1;
    let third = run(&serial).unwrap();
    assert_eq!(first.table.rows, third.table.rows);
    assert_eq!(first.table.rows.len(), 6);
    assert!(first.csv.lines().any(|l| l.starts_with("# grid_convergence: |beta(N) - beta(N/2)|")));
}

#[test]
fn written_files_match_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig::from_toml(SMALL_SWEEP).unwrap();
    let output = run(&config).unwrap();
    let written = output.write(dir.path()).unwrap();
    assert_eq!(written.len(), 2);
    assert_eq!(std::fs::read_to_string(&written[0]).unwrap(), output.csv);
    assert!(std::fs::read_to_string(&written[1]).unwrap().contains("sweep.csv"));
}

#[test]
fn empty_schedule_gives_an_empty_table() {
    let output = run(&RunConfig::from_toml("").unwrap()).unwrap();
    assert!(output.table.rows.is_empty());
    let last = output.csv.lines().last().unwrap();
    assert!(last.starts_with("index,curve,x"));
}

#[test]
fn single_point_single_label_gives_one_row() {
    let text =
        "[schedule]\npoints = [{ x = 1.0, gamma13 = 0.5, gamma23 = 1.0 }]\n[grid]\npoints = 200\n[run]\nlabels = [1]\n";
    let output = run(&RunConfig::from_toml(text).unwrap()).unwrap();
    assert_eq!(output.table.rows.len(), 1);
    let status = output.table.column("status").unwrap();
    assert_eq!(output.table.rows[0][status], Cell::from("ok"));
}

#[test]
fn failing_labels_keep_their_row_with_nan() {
    // Labels 2 and 3 are exactly degenerate without collisions.
    let text = "[schedule]\npoints = [{ x = 1.0, gamma13 = 0.5, gamma23 = 1.0 }]\n[grid]\npoints = 200\n[run]\nlabels = [2, 1]\n";
    let output = run(&RunConfig::from_toml(text).unwrap()).unwrap();
    let status = output.table.column("status").unwrap();
    let re = output.table.column("re_beta_2pi").unwrap();
    assert_ne!(output.table.rows[0][status], Cell::from("ok"));
    assert!(float(&output.table.rows[0][re]).is_nan());
    assert_eq!(output.table.rows[1][status], Cell::from("ok"));
}

#[test]
fn adiabaticity_figure_lists_log_lhs() {
    let mut config = RunConfig::for_figure(FigureId::Adiabaticity);
    config.grid.points = 141;
    let output = run(&config).unwrap();
    let t = output.table.column("t").unwrap();
    let ln = output.table.column("ln_lhs").unwrap();
    assert_eq!(output.table.rows.len(), 141);
    assert_eq!(float(&output.table.rows[0][t]), -6.0);
    for row in &output.table.rows {
        let time = float(&row[t]);
        if (-3.06..=4.39).contains(&time) {
            assert!(float(&row[ln]) < -1.0, "t = {time}");
        }
    }
    assert!(output.csv.contains("# window_endpoints: lhs(-3.06)"));
}

#[test]
fn propagation_trace_column_is_one() {
    let text = "[grid]\npoints = 2000\n";
    let output = run_propagation(&RunConfig::from_toml(text).unwrap(), 1).unwrap();
    let trace = output.table.column("trace").unwrap();
    for row in &output.table.rows {
        assert!((float(&row[trace]) - 1.0).abs() < 1e-10);
    }
    let last = output.table.rows.last().unwrap();
    assert!(float(&last[2]) >= 0.98, "final level-2 population {}", float(&last[2]));
    assert_eq!(output.stem, "sweep_populations");
}

#[test]
fn propagation_without_fields_keeps_populations() {
    let text = "[pulse]\ng01 = 1e-300\ng02 = 1e-300\n[grid]\npoints = 200\n";
    let output = run_propagation(&RunConfig::from_toml(text).unwrap(), 3).unwrap();
    for row in &output.table.rows {
        assert!(float(&row[1]).abs() < 1e-15 && float(&row[2]).abs() < 1e-15);
        assert!((float(&row[3]) - 1.0).abs() < 1e-15);
    }
    assert!(run_propagation(&RunConfig::from_toml(text).unwrap(), 4).is_err());
}

#[test]
fn jordan_reports_liouvillian_clusters() {
    let l = build_superoperator(5.0, 5.0, &DecayRates::new(1.0, 1.0, 0.0, 0.0).unwrap()).unwrap().complex();
    let report = jordan_report(&format_matrix(&l), None, DEFAULT_RANK_TOL).unwrap();
    let clusters: Vec<&str> = report.lines().filter(|l| l.starts_with("cluster:")).collect();
    assert_eq!(clusters.len(), 2, "{report}");
    assert!(clusters.iter().all(|l| l.contains("multiplicity 2")), "{report}");
    assert!(report.contains("reconstruction residual"));
}

#[test]
fn binary_runs_subcommands() {
    let exe = env!("CARGO_BIN_EXE_openphase");
    let dir = tempfile::tempdir().unwrap();

    let status = Command::new(exe).args(["figure", "--id", "fig-9"]).output().unwrap();
    assert!(!status.status.success());
    assert!(String::from_utf8_lossy(&status.stderr).contains("unknown figure id"));

    let matrix = dir.path().join("m.txt");
    std::fs::write(&matrix, "2\n2 0\n1 0\n0 0\n2 0\n").unwrap();
    let out = Command::new(exe).args(["jordan", "--matrix"]).arg(&matrix).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("1 block: λ=2, size 2"));

    let config = dir.path().join("run.toml");
    std::fs::write(&config, SMALL_SWEEP).unwrap();
    let out = Command::new(exe).args(["sweep", "--config"]).arg(&config).arg("--out").arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv, run(&RunConfig::from_toml(SMALL_SWEEP).unwrap()).unwrap().csv);

    std::fs::write(&config, "[grid]\npoints = 40\n").unwrap();
    let out = Command::new(exe).args(["sweep", "--config"]).arg(&config).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid.points"));

    std::fs::write(&config, "[grid]\npoints = 2000\n").unwrap();
    let out = Command::new(exe)
        .args(["propagate", "--initial-level", "1", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("sweep_populations.csv").exists());
}
