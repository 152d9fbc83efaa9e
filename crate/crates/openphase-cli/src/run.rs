//! Sweep execution and table assembly.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use openphase::holonomy::{phases_at_point, sweep_row, HolonomyError, PhaseResult, SweepRow, ThetaGrid};
use openphase::lindblad::{CoherenceVector, DecayRates};
use openphase::oracle::propagate;
use openphase::stirap::{adiabaticity_lhs, theta_of_t};
use rayon::prelude::*;

use crate::config::{rates, RunConfig};
use crate::error::CliError;
use crate::figures::{FigureId, FigureKind, RatePoint};
use crate::plot;
use crate::table::{format_float, Cell, Table};

/// Generated files of one run, not yet written.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub stem: String,
    pub csv: String,
    /// gnuplot script rendering the CSV.
    pub plot: Option<String>,
    pub table: Table,
}

impl Output {
    /// Write `<stem>.csv` and `<stem>.gp` into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let mut written = Vec::new();
        let csv = dir.join(format!("{}.csv", self.stem));
        std::fs::write(&csv, &self.csv).map_err(io(&csv))?;
        written.push(csv);
        if let Some(script) = &self.plot {
            let gp = dir.join(format!("{}.gp", self.stem));
            std::fs::write(&gp, script).map_err(io(&gp))?;
            written.push(gp);
        }
        Ok(written)
    }
}

/// Short status code of a per-label result.
pub fn status_code(result: &Result<PhaseResult, HolonomyError>) -> &'static str {
    fn code(err: &HolonomyError) -> &'static str {
        match err {
            HolonomyError::Sweep { source, .. } => code(source),
            HolonomyError::DegenerateRegime { .. } => "degenerate",
            HolonomyError::AmbiguousLabel { .. } => "ambiguous",
            HolonomyError::LostTrack { .. } => "lost-track",
            HolonomyError::BranchJump { .. } => "branch-jump",
            HolonomyError::EndpointGauge { .. } => "endpoint-gauge",
            _ => "error",
        }
    }
    match result {
        Ok(_) => "ok",
        Err(err) => code(err),
    }
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| CliError::ThreadPool(e.to_string()))
}

fn preamble(table: &mut Table, config: &RunConfig, command: &str) {
    table.note(&format!("openphase-cli {}", env!("CARGO_PKG_VERSION")));
    table.note(&format!("command: {command}"));
    table.note("units: rates in 1/tau, times in tau, phases in units of 2 pi");
    table.note("config:");
    for line in config.echo().lines() {
        table.note(&format!("  {line}"));
    }
}

fn command_name(config: &RunConfig) -> String {
    match config.schedule.figure {
        Some(id) => format!("figure {id}"),
        None => "sweep".to_string(),
    }
}

/// Run the configuration: a phase sweep, the adiabaticity curve or the
/// restricted-window comparison, depending on the selected figure.
pub fn run(config: &RunConfig) -> Result<Output, CliError> {
    config.validate()?;
    let kind = config.schedule.figure.map_or(FigureKind::Phases, FigureId::kind);
    let table = match kind {
        FigureKind::Phases => phase_table(config)?,
        FigureKind::Adiabaticity => adiabaticity_table(config),
        FigureKind::Restricted => restricted_table(config)?,
    };
    let stem = config.output.name.clone();
    let plot = Some(plot::script(config, kind, &table, &format!("{stem}.csv")));
    Ok(Output { stem, csv: table.to_csv(), plot, table })
}

fn schedule_rates(points: &[RatePoint]) -> Result<Vec<DecayRates>, CliError> {
    points.iter().map(rates).collect()
}

/// Per-point phases on `grid`, computed on the bounded pool in schedule order.
fn sweep_rows(config: &RunConfig, schedule: &[DecayRates], grid: &ThetaGrid) -> Result<Vec<SweepRow>, CliError> {
    let p = config.pulse.params();
    let opts = config.track_options();
    let labels = &config.run.labels;
    Ok(pool(config.run.threads)?.install(|| {
        schedule.par_iter().enumerate().map(|(index, r)| sweep_row(index, r, &p, labels, grid, &opts)).collect()
    }))
}

fn rate_cells(point: &RatePoint) -> Vec<Cell> {
    vec![
        Cell::from(point.curve.as_str()),
        Cell::from(point.x),
        Cell::from(point.gamma13),
        Cell::from(point.gamma23),
        Cell::from(point.gamma12),
        Cell::from(point.gamma21),
    ]
}

fn phase_cells(result: &Result<PhaseResult, HolonomyError>) -> [f64; 2] {
    match result {
        Ok(r) => [r.beta.re / TAU, r.beta.im / TAU],
        Err(_) => [f64::NAN; 2],
    }
}

/// |β(N) − β(N/2)|/2π for the successful (point, label) with the largest |β|.
fn convergence_note(config: &RunConfig, schedule: &[DecayRates], rows: &[SweepRow]) -> String {
    let best = rows
        .iter()
        .flat_map(|row| row.phases.iter().filter_map(|r| r.as_ref().ok()).map(move |phase| (row, phase)))
        .fold(None::<(&SweepRow, &PhaseResult)>, |best, item| match best {
            Some(b) if b.1.beta.norm() >= item.1.beta.norm() => Some(b),
            _ => Some(item),
        });
    let Some((row, phase)) = best else {
        return "grid_convergence: unavailable (no successful label)".to_string();
    };
    let (label, beta) = (phase.label, phase.beta);
    let p = config.pulse.params();
    let coarse_points = config.grid.points / 2;
    let coarse = ThetaGrid::uniform_in_time(&p, config.grid.t_min, config.grid.t_max, coarse_points)
        .and_then(|grid| phases_at_point(&grid, &p, &schedule[row.index], &[label], &config.track_options()));
    match coarse.map(|mut v| v.remove(0)) {
        Ok(Ok(phase)) => format!(
            "grid_convergence: |beta(N) - beta(N/2)| / 2 pi = {} (label {label}, point {}, N = {}, N/2 = {coarse_points})",
            format_float((beta - phase.beta).norm() / TAU),
            row.index,
            config.grid.points,
        ),
        _ => "grid_convergence: unavailable (coarse grid failed)".to_string(),
    }
}

fn phase_table(config: &RunConfig) -> Result<Table, CliError> {
    let points = config.schedule.expanded();
    let schedule = schedule_rates(&points)?;
    let p = config.pulse.params();
    let grid = ThetaGrid::uniform_in_time(&p, config.grid.t_min, config.grid.t_max, config.grid.points)?;
    let rows = sweep_rows(config, &schedule, &grid)?;

    let mut table = Table::new(&[
        "index",
        "curve",
        "x",
        "gamma13",
        "gamma23",
        "gamma12",
        "gamma21",
        "label",
        "re_beta_2pi",
        "im_beta_2pi",
        "min_gap",
        "min_overlap",
        "endpoint_overlap",
        "status",
    ]);
    preamble(&mut table, config, &command_name(config));
    table.note(&convergence_note(config, &schedule, &rows));
    for (row, point) in rows.iter().zip(&points) {
        for (label, result) in config.run.labels.iter().zip(&row.phases) {
            let mut cells = vec![Cell::from(row.index)];
            cells.extend(rate_cells(point));
            cells.push(Cell::from(*label));
            cells.extend(phase_cells(result).map(Cell::from));
            let diagnostics = match result {
                Ok(r) => [r.min_gap, r.min_overlap, r.endpoint_overlap],
                Err(_) => [f64::NAN; 3],
            };
            cells.extend(diagnostics.map(Cell::from));
            cells.push(Cell::from(status_code(result)));
            table.push(cells);
        }
    }
    Ok(table)
}

fn restricted_table(config: &RunConfig) -> Result<Table, CliError> {
    let points = config.schedule.expanded();
    let schedule = schedule_rates(&points)?;
    let p = config.pulse.params();
    let full = ThetaGrid::uniform_in_time(&p, config.grid.t_min, config.grid.t_max, config.grid.points)?;
    let (w_min, w_max) = ThetaGrid::ADIABATIC_WINDOW;
    let window = ThetaGrid::uniform_in_time(&p, w_min, w_max, config.grid.points)?;
    let full_rows = sweep_rows(config, &schedule, &full)?;
    let window_rows = sweep_rows(config, &schedule, &window)?;

    let mut table = Table::new(&[
        "index",
        "curve",
        "x",
        "gamma13",
        "gamma23",
        "gamma12",
        "gamma21",
        "label",
        "re_beta_full_2pi",
        "im_beta_full_2pi",
        "re_beta_window_2pi",
        "im_beta_window_2pi",
        "re_difference_2pi",
        "im_difference_2pi",
        "relative_difference",
        "status",
    ]);
    preamble(&mut table, config, &command_name(config));
    table.note(&format!("window: t in [{w_min}, {w_max}] with {} points", config.grid.points));
    for ((f, w), point) in full_rows.iter().zip(&window_rows).zip(&points) {
        for ((label, a), b) in config.run.labels.iter().zip(&f.phases).zip(&w.phases) {
            let mut cells = vec![Cell::from(f.index)];
            cells.extend(rate_cells(point));
            cells.push(Cell::from(*label));
            let [ar, ai] = phase_cells(a);
            let [br, bi] = phase_cells(b);
            let relative = match (a, b) {
                (Ok(a), Ok(b)) => (a.beta - b.beta).norm() / a.beta.norm(),
                _ => f64::NAN,
            };
            cells.extend([ar, ai, br, bi, ar - br, ai - bi, relative].map(Cell::from));
            let status = if a.is_ok() { status_code(b) } else { status_code(a) };
            cells.push(Cell::from(status));
            table.push(cells);
        }
    }
    Ok(table)
}

fn adiabaticity_table(config: &RunConfig) -> Table {
    let p = config.pulse.params();
    let (t_min, t_max) = (config.grid.t_min, config.grid.t_max);
    let n = config.grid.points;
    let mut table = Table::new(&["t", "theta", "lhs", "ln_lhs"]);
    preamble(&mut table, config, &command_name(config));
    let (w_min, w_max) = ThetaGrid::ADIABATIC_WINDOW;
    table.note(&format!(
        "window_endpoints: lhs({w_min}) = {}, lhs({w_max}) = {}, threshold 1/e = {}",
        format_float(adiabaticity_lhs(w_min, &p)),
        format_float(adiabaticity_lhs(w_max, &p)),
        format_float((-1.0f64).exp()),
    ));
    for k in 0..n {
        let t = t_min + (t_max - t_min) * k as f64 / (n - 1) as f64;
        let lhs = adiabaticity_lhs(t, &p);
        table.push(vec![Cell::from(t), Cell::from(theta_of_t(t, &p)), Cell::from(lhs), Cell::from(lhs.ln())]);
    }
    table
}

/// Populations of the three levels over the grid window, starting in `initial_level`
/// (1-based). Rates come from the first schedule point, or zero for an empty schedule.
pub fn run_propagation(config: &RunConfig, initial_level: usize) -> Result<Output, CliError> {
    config.validate()?;
    if !(1..=3).contains(&initial_level) {
        return Err(CliError::InvalidConfig { field: "initial-level", reason: "expected 1, 2 or 3".to_string() });
    }
    let points = config.schedule.expanded();
    let decay = points.first().map(rates).transpose()?.unwrap_or(DecayRates::ZERO);
    let p = config.pulse.params();
    let result = propagate(
        &CoherenceVector::level(initial_level - 1),
        &p,
        &decay,
        (config.grid.t_min, config.grid.t_max),
        config.grid.points,
    )?;

    let mut table = Table::new(&["t", "p1", "p2", "p3", "trace"]);
    preamble(&mut table, config, &format!("propagate --initial-level {initial_level}"));
    table.note(&format!(
        "rates: gamma13 = {}, gamma23 = {}, gamma12 = {}, gamma21 = {}",
        decay.gamma13, decay.gamma23, decay.gamma12, decay.gamma21
    ));
    table.note(&format!(
        "steps: {}, step_doubling_difference: {}",
        config.grid.points,
        format_float(result.doubling_difference)
    ));
    for (t, pops) in result.times.iter().zip(&result.populations) {
        let trace: f64 = pops.iter().sum();
        table.push(vec![
            Cell::from(*t),
            Cell::from(pops[0]),
            Cell::from(pops[1]),
            Cell::from(pops[2]),
            Cell::from(trace),
        ]);
    }
    let stem = format!("{}_populations", config.output.name);
    let plot = Some(plot::population_script(&format!("{stem}.csv"), &stem));
    Ok(Output { stem, csv: table.to_csv(), plot, table })
}
