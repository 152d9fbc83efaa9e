use alloc::boxed::Box;
use alloc::vec::Vec;

use super::{
    check_labels, geometric_phase, label_paths_closed_limit, track_eigenpaths, HolonomyError, PhaseResult, ThetaGrid,
    TrackOptions,
};
use crate::lindblad::DecayRates;
use crate::stirap::PulseParams;

/// Phases of the requested labels for one rate setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub rates: DecayRates,
    /// One entry per requested label, in request order.
    pub phases: Vec<Result<PhaseResult, HolonomyError>>,
}

/// Track, label and integrate the requested labels at one rate setting.
///
/// Degeneracy and tracking failures are judged per label: a label fails with
/// [`HolonomyError::DegenerateRegime`] or [`HolonomyError::LostTrack`] only if its
/// own path is affected. With `opts.lenient` those diagnostics are reported in the
/// result instead. The outer error covers failures of the whole point.
pub fn phases_at_point(
    grid: &ThetaGrid,
    p: &PulseParams,
    rates: &DecayRates,
    labels: &[u8],
    opts: &TrackOptions,
) -> Result<Vec<Result<PhaseResult, HolonomyError>>, HolonomyError> {
    check_labels(labels)?;
    let tracking = TrackOptions { lenient: true, ..opts.clone() };
    let mut paths = track_eigenpaths(grid, p, rates, &tracking)?;
    let assignment = label_paths_closed_limit(&mut paths, p, rates, &tracking)?;
    Ok(labels
        .iter()
        .map(|&label| {
            let i = assignment.path_of(label).ok_or(HolonomyError::AmbiguousLabel { label, ratio: 0.0 })?;
            let path = &paths[i];
            if !opts.lenient {
                if !assignment.is_confident(i) {
                    return Err(HolonomyError::AmbiguousLabel { label, ratio: assignment.confidence[i] });
                }
                if path.min_gap < opts.degeneracy_rel {
                    return Err(HolonomyError::DegenerateRegime {
                        label: Some(label),
                        theta: path.min_gap_theta,
                        gap: path.min_gap,
                        tol: opts.degeneracy_rel,
                    });
                }
                if path.min_overlap < opts.min_overlap {
                    return Err(HolonomyError::LostTrack { theta: path.min_overlap_theta, overlap: path.min_overlap });
                }
            }
            geometric_phase(path, p.phi, &opts.representation)
        })
        .collect())
}

/// [`phases_at_point`] over a rate schedule; errors carry the schedule index.
pub fn phase_sweep(
    schedule: &[DecayRates],
    p: &PulseParams,
    labels: &[u8],
    grid: &ThetaGrid,
    opts: &TrackOptions,
) -> Vec<SweepRow> {
    schedule.iter().enumerate().map(|(index, rates)| sweep_row(index, rates, p, labels, grid, opts)).collect()
}

/// One row of [`phase_sweep`].
pub fn sweep_row(
    index: usize,
    rates: &DecayRates,
    p: &PulseParams,
    labels: &[u8],
    grid: &ThetaGrid,
    opts: &TrackOptions,
) -> SweepRow {
    let annotate = |e: HolonomyError| HolonomyError::Sweep { index, source: Box::new(e) };
    let phases = match phases_at_point(grid, p, rates, labels, opts) {
        Ok(results) => results.into_iter().map(|r| r.map_err(annotate)).collect(),
        Err(e) => labels.iter().map(|_| Err(annotate(e.clone()))).collect(),
    };
    SweepRow { index, rates: *rates, phases }
}
