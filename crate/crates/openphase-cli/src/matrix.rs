//! Plain-text matrix files and the Jordan report.
//!
//! Format: first line `dim`, then `dim²` lines `re im` in row-major order. Blank
//! lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use openphase::matops::{default_cluster_tol, jordan_form, CMatrix, JordanForm, C64};

use crate::error::CliError;
use crate::table::format_float;

/// Default rank tolerance of the Jordan chain construction.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

pub fn parse_matrix(text: &str) -> Result<CMatrix, CliError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'));
    let err = |line, reason: String| CliError::MatrixParse { line, reason };
    let (line, first) = lines.next().ok_or_else(|| err(1, "missing dimension line".to_string()))?;
    let dim: usize = first.parse().map_err(|_| err(line, format!("expected a dimension, found '{first}'")))?;
    if dim == 0 {
        return Err(err(line, "dimension must be positive".to_string()));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for (line, text) in lines {
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(err(line, format!("expected 're im', found '{text}'")));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|_| err(line, format!("'{s}' is not a number")));
        entries.push(C64::new(parse(fields[0])?, parse(fields[1])?));
        if entries.len() > dim * dim {
            return Err(err(line, format!("more than {} entries", dim * dim)));
        }
    }
    if entries.len() != dim * dim {
        return Err(err(text.lines().count(), format!("expected {} entries, found {}", dim * dim, entries.len())));
    }
    Ok(CMatrix::from_row_slice(dim, dim, &entries))
}

pub fn format_matrix(m: &CMatrix) -> String {
    let mut out = format!("{}\n", m.nrows());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            let _ = writeln!(out, "{:e} {:e}", z.re, z.im);
        }
    }
    out
}

/// Shortest decimal form of `x` rounded to 12 significant digits.
fn short(x: f64) -> String {
    let rounded: f64 = format_float(x).parse().unwrap_or(x);
    format!("{}", rounded + 0.0)
}

fn eigenvalue_text(z: C64, tol: f64) -> String {
    if z.im.abs() <= tol {
        short(z.re)
    } else if z.re.abs() <= tol {
        format!("{}i", short(z.im))
    } else {
        format!("{}{}{}i", short(z.re), if z.im < 0.0 { "-" } else { "+" }, short(z.im.abs()))
    }
}

/// Textual report of the Jordan form: blocks, eigenvalue clusters, condition
/// estimate of the transform and reconstruction residual.
pub fn report(form: &JordanForm) -> String {
    let tol = form.cluster_tol;
    let mut out = String::new();
    let sizes: Vec<String> = form.blocks.iter().map(|b| b.size.to_string()).collect();
    if let [block] = form.blocks.as_slice() {
        let _ = writeln!(out, "1 block: λ={}, size {}", eigenvalue_text(block.eigenvalue, tol), block.size);
    } else {
        let _ = writeln!(out, "{} blocks, sizes {}", form.blocks.len(), sizes.join(","));
        for (k, block) in form.blocks.iter().enumerate() {
            let _ = writeln!(out, "block {}: λ={}, size {}", k + 1, eigenvalue_text(block.eigenvalue, tol), block.size);
        }
    }
    // Eigenvalues carried by more than one dimension.
    let mut clusters: Vec<(C64, Vec<usize>)> = Vec::new();
    for block in &form.blocks {
        match clusters.iter_mut().find(|(z, _)| (z - block.eigenvalue).norm() <= tol) {
            Some((_, members)) => members.push(block.size),
            None => clusters.push((block.eigenvalue, vec![block.size])),
        }
    }
    for (z, members) in clusters.iter().filter(|(_, m)| m.iter().sum::<usize>() > 1) {
        let sizes: Vec<String> = members.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(
            out,
            "cluster: λ={}, multiplicity {}, block sizes {}",
            eigenvalue_text(*z, tol),
            members.iter().sum::<usize>(),
            sizes.join(",")
        );
    }
    let _ = writeln!(out, "cluster tolerance: {}", format_float(form.cluster_tol));
    let _ = writeln!(out, "rank tolerance: {}", format_float(form.rank_tol));
    let _ = writeln!(out, "condition estimate: {}", format_float(form.condition));
    let _ = writeln!(out, "reconstruction residual: {}", format_float(form.residual));
    out
}

/// Parse, decompose and report; `cluster_tol` defaults to 1e-7·‖M‖.
pub fn jordan_report(text: &str, cluster_tol: Option<f64>, rank_tol: f64) -> Result<String, CliError> {
    let m = parse_matrix(text)?;
    let tol = cluster_tol.unwrap_or_else(|| default_cluster_tol(&m));
    Ok(report(&jordan_form(&m, tol, rank_tol)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = CMatrix::from_fn(3, 3, |i, j| C64::new(i as f64 - 0.5, j as f64 * 1e-3));
        assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let cases = [("", 1), ("x\n", 1), ("2\n1 0\n0\n", 3), ("1\n1 0\n2 0\n", 3), ("2\n1 0\n", 2), ("1\n1 y\n", 2)];
        for (text, expected) in cases {
            match parse_matrix(text) {
                Err(CliError::MatrixParse { line, .. }) => assert_eq!(line, expected, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn defective_two_by_two() {
        let report = jordan_report("2\n2 0\n1 0\n0 0\n2 0\n", None, DEFAULT_RANK_TOL).unwrap();
        assert!(report.starts_with("1 block: λ=2, size 2\n"), "{report}");
    }

    #[test]
    fn diagonal_three_by_three() {
        let text = "3\n1 0\n0 0\n0 0\n0 0\n2 0\n0 0\n0 0\n0 0\n3 0\n";
        let report = jordan_report(text, None, DEFAULT_RANK_TOL).unwrap();
        assert!(report.starts_with("3 blocks, sizes 1,1,1\n"), "{report}");
        assert!(!report.contains("cluster:"));
    }

    #[test]
    fn complex_eigenvalues_are_printed_with_sign() {
        assert_eq!(eigenvalue_text(C64::new(0.0, -5.0), 1e-9), "-5i");
        assert_eq!(eigenvalue_text(C64::new(-1.5, 2.0), 1e-9), "-1.5+2i");
    }
}
