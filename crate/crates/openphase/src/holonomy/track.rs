use alloc::vec;
use alloc::vec::Vec;

use super::{HolonomyError, ThetaGrid, TrackOptions};
use crate::lindblad::{superoperator_unchecked, DecayRates};
use crate::matops::{
    bilinear, frobenius_norm, max_weight_assignment, normalize_pairs, spectral_decompose, to_complex, CVector,
    EigenSystem, C64,
};
use crate::stirap::{theta_of_t, PulseParams};

/// One eigen-triple followed along the grid, in time order.
///
/// Rights are phase-aligned with their predecessor and lefts satisfy
/// ⟨⟨E|D⟩⟩ = 1 at every point. Refinement points are included.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPath {
    pub label: Option<u8>,
    /// Best/second-best overlap ratio of the labeling; below 2 is ambiguous.
    pub label_confidence: f64,
    pub times: Vec<f64>,
    pub thetas: Vec<f64>,
    pub eigenvalues: Vec<C64>,
    pub rights: Vec<CVector>,
    pub lefts: Vec<CVector>,
    /// Smallest gap to any other eigenvalue, relative to ‖L‖.
    pub min_gap: f64,
    pub min_gap_theta: f64,
    /// Smallest matched overlap |⟨⟨Eₖ|Dₖ₊₁⟩⟩| between neighbours.
    pub min_overlap: f64,
    pub min_overlap_theta: f64,
}

impl EigenPath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Normalized eigen-decomposition at one point of the path.
#[derive(Debug, Clone)]
pub(crate) struct Sample {
    pub t: f64,
    pub theta: f64,
    pub scale: f64,
    pub sys: EigenSystem,
}

impl Sample {
    /// Gap of eigenvalue `i` to the rest, relative to ‖L‖.
    pub fn relative_gap(&self, i: usize) -> f64 {
        let lam = self.sys.eigenvalues[i];
        let gap = self
            .sys
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, mu)| (lam - mu).norm())
            .fold(f64::INFINITY, f64::min);
        gap / self.scale.max(f64::MIN_POSITIVE)
    }
}

pub(crate) fn sample(
    t: f64,
    theta: f64,
    p: &PulseParams,
    rates: &DecayRates,
    opts: &TrackOptions,
) -> Result<Sample, HolonomyError> {
    let (g1, g2) = opts.field_path.fields(t, theta, p);
    let coherence = to_complex(&superoperator_unchecked(g1, g2, rates));
    let l = opts.representation.supermatrix(&coherence);
    let sys = spectral_decompose(&l, opts.eig_tol).map_err(|source| HolonomyError::Linear { theta, source })?;
    Ok(Sample { t, theta, scale: frobenius_norm(&l), sys: normalize_pairs(&sys) })
}

/// Overlap weights |⟨⟨E_i^prev|D_j^next⟩⟩| as a row-major n×n table.
pub(crate) fn overlap_weights(prev_lefts: &[CVector], next_rights: &[CVector]) -> Vec<f64> {
    let n = prev_lefts.len();
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            w[i * n + j] = bilinear(&prev_lefts[i], &next_rights[j]).norm();
        }
    }
    w
}

struct Builder {
    paths: Vec<EigenPath>,
}

impl Builder {
    fn new(first: &Sample, n: usize) -> Self {
        let paths = (0..n)
            .map(|i| EigenPath {
                label: None,
                label_confidence: 0.0,
                times: vec![first.t],
                thetas: vec![first.theta],
                eigenvalues: vec![first.sys.eigenvalues[i]],
                rights: vec![first.sys.rights[i].clone()],
                lefts: vec![first.sys.lefts[i].clone()],
                min_gap: first.relative_gap(i),
                min_gap_theta: first.theta,
                min_overlap: 1.0,
                min_overlap_theta: first.theta,
            })
            .collect();
        Builder { paths }
    }

    fn lefts(&self) -> Vec<CVector> {
        self.paths.iter().map(|p| p.lefts.last().unwrap().clone()).collect()
    }

    /// Append `next` with path `i` taking eigen-index `perm[i]`.
    fn push(&mut self, next: &Sample, perm: &[usize], overlaps: &[f64], opts: &TrackOptions) {
        for (i, path) in self.paths.iter_mut().enumerate() {
            let j = perm[i];
            let mut d = next.sys.rights[j].clone();
            let mut e = next.sys.lefts[j].clone();
            let z = opts.representation.inner(path.rights.last().unwrap(), &d);
            if z.norm() > 0.0 {
                let u = z.conj() / z.norm();
                d *= u;
                e /= u;
            }
            path.times.push(next.t);
            path.thetas.push(next.theta);
            path.eigenvalues.push(next.sys.eigenvalues[j]);
            path.rights.push(d);
            path.lefts.push(e);
            let gap = next.relative_gap(j);
            if gap < path.min_gap {
                path.min_gap = gap;
                path.min_gap_theta = next.theta;
            }
            if overlaps[i] < path.min_overlap {
                path.min_overlap = overlaps[i];
                path.min_overlap_theta = next.theta;
            }
        }
    }
}

/// Matched overlap per path for a step, and the smallest one over paths that are
/// not degenerate at either end.
fn match_step(lefts: &[CVector], next: &Sample, prev_gaps: &[f64], degeneracy_rel: f64) -> (Vec<usize>, Vec<f64>, f64) {
    let n = lefts.len();
    let w = overlap_weights(lefts, &next.sys.rights);
    let perm = max_weight_assignment(&w, n);
    let overlaps: Vec<f64> = (0..n).map(|i| w[i * n + perm[i]]).collect();
    let worst = (0..n)
        .filter(|&i| prev_gaps[i] >= degeneracy_rel && next.relative_gap(perm[i]) >= degeneracy_rel)
        .map(|i| overlaps[i])
        .fold(f64::INFINITY, f64::min);
    (perm, overlaps, worst)
}

fn current_gaps(builder: &Builder, last: &Sample, last_perm: &[usize]) -> Vec<f64> {
    (0..builder.paths.len()).map(|i| last.relative_gap(last_perm[i])).collect()
}

/// Follow all nine eigen-triples of the supermatrix along `grid`.
///
/// Neighbouring points are matched by the assignment maximizing the bilinear
/// overlaps. A step whose smallest matched overlap (among non-degenerate paths)
/// is below `min_overlap` is subdivided once; if that does not help, the step
/// fails with [`HolonomyError::LostTrack`]. Degenerate points fail with
/// [`HolonomyError::DegenerateRegime`]. With `opts.lenient` both conditions are
/// only recorded in the per-path diagnostics.
pub fn track_eigenpaths(
    grid: &ThetaGrid,
    p: &PulseParams,
    rates: &DecayRates,
    opts: &TrackOptions,
) -> Result<Vec<EigenPath>, HolonomyError> {
    rates.validate()?;
    if !(opts.min_overlap > 0.0 && opts.min_overlap <= 1.0) {
        return Err(HolonomyError::InvalidGrid("min_overlap must lie in (0, 1]"));
    }
    let times = grid.times();
    let thetas = grid.thetas();
    let first = sample(times[0], thetas[0], p, rates, opts)?;
    let n = first.sys.dim();
    let check_degenerate = |s: &Sample| -> Result<(), HolonomyError> {
        if opts.lenient {
            return Ok(());
        }
        let worst = (0..n).map(|i| s.relative_gap(i)).fold(f64::INFINITY, f64::min);
        if worst < opts.degeneracy_rel {
            return Err(HolonomyError::DegenerateRegime {
                label: None,
                theta: s.theta,
                gap: worst,
                tol: opts.degeneracy_rel,
            });
        }
        Ok(())
    };
    check_degenerate(&first)?;

    let mut builder = Builder::new(&first, n);
    let mut last = first;
    let mut last_perm: Vec<usize> = (0..n).collect();

    for k in 1..times.len() {
        let next = sample(times[k], thetas[k], p, rates, opts)?;
        check_degenerate(&next)?;
        let gaps = current_gaps(&builder, &last, &last_perm);
        let (perm, overlaps, worst) = match_step(&builder.lefts(), &next, &gaps, opts.degeneracy_rel);
        if worst >= opts.min_overlap || (opts.refine_points == 0 && opts.lenient) {
            builder.push(&next, &perm, &overlaps, opts);
            last = next;
            last_perm = perm;
            continue;
        }

        // Subdivide the step once.
        let (t_a, t_b) = (times[k - 1], times[k]);
        let parts = opts.refine_points + 1;
        let mut refined: Vec<Sample> = Vec::with_capacity(parts);
        for j in 1..parts {
            let t = t_a + (t_b - t_a) * j as f64 / parts as f64;
            let s = sample(t, theta_of_t(t, p), p, rates, opts)?;
            check_degenerate(&s)?;
            refined.push(s);
        }
        refined.push(next);
        for s in refined {
            let gaps = current_gaps(&builder, &last, &last_perm);
            let (perm, overlaps, worst) = match_step(&builder.lefts(), &s, &gaps, opts.degeneracy_rel);
            if worst < opts.min_overlap && !opts.lenient {
                return Err(HolonomyError::LostTrack { theta: s.theta, overlap: worst });
            }
            builder.push(&s, &perm, &overlaps, opts);
            last = s;
            last_perm = perm;
        }
    }
    Ok(builder.paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(p: &PulseParams, n: usize) -> ThetaGrid {
        ThetaGrid::uniform_in_time(p, -3.06, 4.39, n).unwrap()
    }

    #[test]
    fn collisional_paths_are_continuous_and_normalized() {
        let p = PulseParams::reference();
        let rates = DecayRates::new(0.0, 0.0, 1.9, 0.95).unwrap();
        let paths = track_eigenpaths(&grid(&p, 300), &p, &rates, &TrackOptions::default()).unwrap();
        assert_eq!(paths.len(), 9);
        for path in &paths {
            assert!(path.min_overlap > 0.9);
            for (d, e) in path.rights.iter().zip(&path.lefts) {
                assert!((bilinear(e, d) - C64::new(1.0, 0.0)).norm() < 1e-9);
            }
            let jump = path.eigenvalues.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max);
            assert!(jump < 1.0, "eigenvalue jump {jump}");
        }
    }

    #[test]
    fn strict_tracking_rejects_exact_degeneracy() {
        let p = PulseParams::reference();
        let rates = DecayRates::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let err = track_eigenpaths(&grid(&p, 50), &p, &rates, &TrackOptions::default()).unwrap_err();
        assert!(matches!(err, HolonomyError::DegenerateRegime { .. }), "{err:?}");
    }

    #[test]
    fn lenient_tracking_records_degeneracy() {
        let p = PulseParams::reference();
        let rates = DecayRates::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let opts = TrackOptions { lenient: true, ..TrackOptions::default() };
        let paths = track_eigenpaths(&grid(&p, 50), &p, &rates, &opts).unwrap();
        assert!(paths.iter().any(|path| path.min_gap < opts.degeneracy_rel));
    }
}
