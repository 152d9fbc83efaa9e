#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use super::track::{overlap_weights, sample, EigenPath};
use super::{HolonomyError, TrackOptions};
use crate::lindblad::DecayRates;
use crate::matops::{max_weight_assignment, CVector, C64};
use crate::stirap::{closed_eigensystem, PulseParams, StateLabel};

/// Smallest rate scale reached by the continuation to the closed system.
pub const CLOSED_LIMIT_SCALE: f64 = 1e-6;
/// Geometric steps between full rates and [`CLOSED_LIMIT_SCALE`].
pub const HOMOTOPY_STEPS: usize = 16;
/// Best/second-best ratio below which a label counts as ambiguous.
const CONFIDENCE: f64 = 2.0;

/// Closed-system eigenoperator |n⟩⟨m| of each label; its eigenvalue is i(E_m − E_n).
///
/// Labels 4–6 share eigenvalue 0 and are ordered by decreasing real part at full
/// rates, so their pairs here are nominal.
pub fn closed_operator_pair(label: u8) -> Option<(StateLabel, StateLabel)> {
    use StateLabel::{Minus, Plus, Zero};
    Some(match label {
        1 => (Minus, Plus),
        2 => (Zero, Plus),
        3 => (Minus, Zero),
        4 => (Zero, Zero),
        5 => (Plus, Plus),
        6 => (Minus, Minus),
        7 => (Plus, Zero),
        8 => (Zero, Minus),
        9 => (Plus, Minus),
        _ => return None,
    })
}

/// Closed-system eigenvalue of each label in units of i·|g|.
pub(crate) fn closed_level(label: u8) -> i32 {
    match label {
        1 => 2,
        2 | 3 => 1,
        4..=6 => 0,
        7 | 8 => -1,
        _ => -2,
    }
}

/// Labels sharing the closed eigenvalue of `label`.
pub(crate) fn label_group(label: u8) -> &'static [u8] {
    match closed_level(label) {
        2 => &[1],
        1 => &[2, 3],
        0 => &[4, 5, 6],
        -1 => &[7, 8],
        _ => &[9],
    }
}

/// Label and labeling confidence of each path, in path order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelAssignment {
    pub labels: [u8; 9],
    pub confidence: [f64; 9],
}

impl LabelAssignment {
    /// Index of the path carrying `label`.
    pub fn path_of(&self, label: u8) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn is_confident(&self, path: usize) -> bool {
        self.confidence[path] >= CONFIDENCE
    }
}

fn ratio_of_best(row: &[f64], chosen: usize) -> f64 {
    let best = row[chosen];
    let second = row.iter().enumerate().filter(|&(j, _)| j != chosen).map(|(_, &w)| w).fold(0.0, f64::max);
    if second == 0.0 {
        f64::INFINITY
    } else {
        best / second
    }
}

/// Label the nine paths by continuing their mid-grid eigen-triples to the closed
/// system.
///
/// The rates are scaled by `s` from 1 down to [`CLOSED_LIMIT_SCALE`] in
/// [`HOMOTOPY_STEPS`] geometric steps, matching eigen-triples by overlap at each
/// step. At the end each eigenvalue is assigned to the nearest closed level
/// {2, 1, 0, −1, −2}·i|g|, and inside the ±i|g| levels to the closed eigenoperator
/// with the largest Hilbert–Schmidt overlap. When those overlaps do not decide
/// (ratio below 2), and always inside the zero level, paths are ordered by
/// decreasing real part at full rates. The confidence of a path is the smallest
/// best/second-best ratio met on the way.
pub fn label_paths_closed_limit(
    paths: &mut [EigenPath],
    p: &PulseParams,
    rates: &DecayRates,
    opts: &TrackOptions,
) -> Result<LabelAssignment, HolonomyError> {
    let n = paths.len();
    if n != 9 || paths[0].is_empty() {
        return Err(HolonomyError::InvalidGrid("labeling needs nine non-empty paths"));
    }
    let mid = paths[0].len() / 2;
    let (t, theta) = (paths[0].times[mid], paths[0].thetas[mid]);
    let (g1, g2) = opts.field_path.fields(t, theta, p);
    let field_norm = g1.hypot(g2);

    let full_rates: Vec<f64> = paths.iter().map(|path| path.eigenvalues[mid].re).collect();
    let scale = sample(t, theta, p, rates, opts)?.scale;
    let mut lefts: Vec<CVector> = paths.iter().map(|path| path.lefts[mid].clone()).collect();
    let mut rights: Vec<CVector> = paths.iter().map(|path| path.rights[mid].clone()).collect();
    let mut values: Vec<C64> = paths.iter().map(|path| path.eigenvalues[mid]).collect();
    let mut confidence = [f64::INFINITY; 9];

    for step in 1..=HOMOTOPY_STEPS {
        let s = CLOSED_LIMIT_SCALE.powf(step as f64 / HOMOTOPY_STEPS as f64);
        let next = sample(t, theta, p, &rates.scaled(s.sqrt()), opts)?;
        let w = overlap_weights(&lefts, &next.sys.rights);
        let perm = max_weight_assignment(&w, n);
        for i in 0..n {
            confidence[i] = confidence[i].min(ratio_of_best(&w[i * n..(i + 1) * n], perm[i]));
            lefts[i] = next.sys.lefts[perm[i]].clone();
            rights[i] = next.sys.rights[perm[i]].clone();
            values[i] = next.sys.eigenvalues[perm[i]];
        }
    }

    // Closed level of each path.
    let mut levels = [0i32; 9];
    for i in 0..n {
        let x = values[i].im / field_norm;
        let mut distances: Vec<(i32, f64)> = (-2..=2).map(|l| (l, (x - l as f64).abs())).collect();
        distances.sort_by(|a, b| a.1.total_cmp(&b.1));
        levels[i] = distances[0].0;
        let ratio = if distances[0].1 == 0.0 { f64::INFINITY } else { distances[1].1 / distances[0].1 };
        confidence[i] = confidence[i].min(ratio);
    }

    let closed = closed_eigensystem(theta, p.phi, field_norm);
    let rep = &opts.representation;
    let mut labels = [0u8; 9];
    for level in [2, 1, 0, -1, -2] {
        let members: Vec<usize> = (0..n).filter(|&i| levels[i] == level).collect();
        let group = label_group(match level {
            2 => 1,
            1 => 2,
            0 => 4,
            -1 => 7,
            _ => 9,
        });
        if members.len() != group.len() {
            for &i in &members {
                confidence[i] = 0.0;
            }
        }
        if level == 0 {
            let mut order = members.clone();
            order.sort_by(|&a, &b| full_rates[b].total_cmp(&full_rates[a]));
            for (slot, &i) in order.iter().enumerate() {
                labels[i] = group.get(slot).copied().unwrap_or(0);
            }
            continue;
        }
        if members.len() != group.len() {
            for (slot, &i) in members.iter().enumerate() {
                labels[i] = group.get(slot).copied().unwrap_or(0);
            }
            continue;
        }
        // Hilbert–Schmidt overlaps with the group's closed eigenoperators.
        let k = group.len();
        let mut overlaps = Vec::with_capacity(k * k);
        for &i in &members {
            let d = &rights[i];
            for &label in group {
                let (a, b) = closed_operator_pair(label).unwrap();
                let r = rep.operator_vector(&closed.outer(a, b));
                overlaps.push(rep.inner(&r, d).norm() / (rep.norm(&r) * rep.norm(d)));
            }
        }
        let perm = max_weight_assignment(&overlaps, k);
        let decisive = (0..k).all(|row| ratio_of_best(&overlaps[row * k..(row + 1) * k], perm[row]) >= CONFIDENCE);
        if decisive || k == 1 {
            for (row, &i) in members.iter().enumerate() {
                labels[i] = group[perm[row]];
            }
            continue;
        }
        // Relaxation can leave the closed-limit eigenoperators as equal-weight
        // mixtures of the pair; then the less damped path takes the lower label.
        let (a, b) = (members[0], members[1]);
        let (upper, lower) = if full_rates[a] >= full_rates[b] { (a, b) } else { (b, a) };
        labels[upper] = group[0];
        labels[lower] = group[1];
        if (full_rates[a] - full_rates[b]).abs() < opts.degeneracy_rel * scale {
            confidence[a] = 0.0;
            confidence[b] = 0.0;
        }
    }

    for (i, path) in paths.iter_mut().enumerate() {
        path.label = Some(labels[i]).filter(|&l| l != 0);
        path.label_confidence = confidence[i];
    }
    Ok(LabelAssignment { labels, confidence })
}
