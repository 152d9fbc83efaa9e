//! gnuplot scripts for the generated CSV files. The scripts are written, never run.

use std::fmt::Write as _;

use crate::config::RunConfig;
use crate::figures::{FigureId, FigureKind};
use crate::table::{Cell, Table};

fn header(out: &mut String, csv: &str, xlabel: &str, ylabel: &str) {
    let png = csv.trim_end_matches(".csv");
    let _ = writeln!(out, "# gnuplot script for {csv}");
    out.push_str("set datafile separator \",\"\n");
    out.push_str("set datafile commentschars \"#\"\n");
    out.push_str("set terminal pngcairo size 900,600\n");
    let _ = writeln!(out, "set output \"{png}.png\"");
    let _ = writeln!(out, "set xlabel \"{xlabel}\"");
    let _ = writeln!(out, "set ylabel \"{ylabel}\"");
    out.push_str("set key outside right\n");
    out.push_str("set grid\n");
}

/// Curve names in first-appearance order.
fn curves(table: &Table) -> Vec<String> {
    let column = table.column("curve").expect("phase tables have a curve column");
    let mut names: Vec<String> = Vec::new();
    for row in &table.rows {
        if let Cell::Text(name) = &row[column] {
            if !names.contains(name) {
                names.push(name.clone());
            }
        }
    }
    names
}

/// Script for a phase, restricted or adiabaticity table.
pub fn script(config: &RunConfig, kind: FigureKind, table: &Table, csv: &str) -> String {
    let figure = config.schedule.figure;
    let mut out = String::new();
    // gnuplot columns are 1-based.
    let col = |name: &str| table.column(name).expect("known column") + 1;
    match kind {
        FigureKind::Adiabaticity => {
            header(&mut out, csv, "t / tau", "ln(lhs)");
            let _ = writeln!(
                out,
                "plot \"{csv}\" using {}:{} with lines title \"ln lhs\", -1 with lines dashtype 2 title \"ln(1/e)\"",
                col("t"),
                col("ln_lhs")
            );
        }
        FigureKind::Phases | FigureKind::Restricted => {
            let xlabel = figure.map_or("x", FigureId::x_label);
            let (ylabel, value) = match kind {
                FigureKind::Restricted => ("Re(beta - beta') / 2 pi", "re_difference_2pi"),
                _ => ("Re beta / 2 pi", "re_beta_2pi"),
            };
            header(&mut out, csv, xlabel, ylabel);
            let mut lines = Vec::new();
            for curve in curves(table) {
                for &label in &config.run.labels {
                    let sign = figure.map_or(1.0, |id| id.plot_sign(label));
                    let prefix = if sign < 0.0 { "-" } else { "" };
                    lines.push(format!(
                        "  \"{csv}\" using ((strcol({}) eq \"{curve}\" && ${} == {label}) ? ${} : NaN):({sign} * ${}) with linespoints title \"{curve}: {prefix}Re beta{label}\"",
                        col("curve"),
                        col("label"),
                        col("x"),
                        col(value),
                    ));
                }
            }
            if lines.is_empty() {
                out.push_str("# empty schedule: nothing to plot\n");
            } else {
                out.push_str("plot \\\n");
                out.push_str(&lines.join(", \\\n"));
                out.push('\n');
            }
        }
    }
    out
}

/// Script for a population table.
pub fn population_script(csv: &str, stem: &str) -> String {
    let mut out = String::new();
    header(&mut out, csv, "t / tau", "population");
    let _ = writeln!(out, "set title \"{stem}\"");
    out.push_str("plot \\\n");
    let lines: Vec<String> =
        (1..=3).map(|level| format!("  \"{csv}\" using 1:{} with lines title \"level {level}\"", level + 1)).collect();
    out.push_str(&lines.join(", \\\n"));
    out.push('\n');
    out
}
