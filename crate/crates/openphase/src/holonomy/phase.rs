#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use super::label::{closed_operator_pair, label_group};
use super::{EigenPath, HolonomyError, Representation};
use crate::matops::{bilinear, CVector, C64};
use crate::stirap::{closed_eigensystem, StateLabel};

/// Geometric phase of one labeled path.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseResult {
    pub label: u8,
    /// β in radians.
    pub beta: C64,
    /// Points used, including refinement points.
    pub grid_points: usize,
    /// Time window (t_min, t_max).
    pub window: (f64, f64),
    pub min_gap: f64,
    pub min_overlap: f64,
    /// Normalized overlap of the endpoint eigenoperators with their closed reference.
    pub endpoint_overlap: f64,
}

/// Endpoint gauge factors `a₀, a_N` and the closed reference operator used.
#[derive(Debug, Clone, PartialEq)]
pub struct EndpointGauge {
    pub start: C64,
    pub end: C64,
    pub reference: (StateLabel, StateLabel),
    pub overlap: f64,
}

/// Smallest normalized reference overlap for which the endpoint gauge is defined.
const MIN_REFERENCE_OVERLAP: f64 = 1e-6;

fn normalized_overlap(rep: &Representation, r: &CVector, d: &CVector) -> C64 {
    rep.inner(r, d) / (rep.norm(r) * rep.norm(d))
}

/// Factors `a` making `a·D` unit in Hilbert–Schmidt norm with a real positive
/// overlap with the closed eigenoperator `R`, at both ends of the path.
///
/// `R` is the label's own closed eigenoperator unless another member of its
/// closed-eigenvalue group overlaps the start more than twice as well; the same
/// |n⟩⟨m| is used at the end.
pub fn endpoint_factors(path: &EigenPath, phi: f64, rep: &Representation) -> Result<EndpointGauge, HolonomyError> {
    let label = path.label.ok_or(HolonomyError::Unlabeled)?;
    let last = path.len() - 1;
    let reference_at = |k: usize, pair: (StateLabel, StateLabel)| {
        let closed = closed_eigensystem(path.thetas[k], phi, 1.0);
        rep.operator_vector(&closed.outer(pair.0, pair.1))
    };
    let own = closed_operator_pair(label).ok_or(HolonomyError::InvalidLabel(label))?;
    let start_overlap = |pair| normalized_overlap(rep, &reference_at(0, pair), &path.rights[0]).norm();
    let (best, best_overlap) = label_group(label)
        .iter()
        .map(|&l| closed_operator_pair(l).unwrap())
        .map(|pair| (pair, start_overlap(pair)))
        .fold((own, -1.0), |best, item| if item.1 > best.1 { item } else { best });
    let reference = if start_overlap(own) >= 0.5 * best_overlap { own } else { best };

    let factor = |k: usize| -> (C64, f64) {
        let d = &path.rights[k];
        let r = reference_at(k, reference);
        let z = rep.inner(&r, d);
        let overlap = z.norm() / (rep.norm(&r) * rep.norm(d));
        let phase = if z.norm() > 0.0 { z.conj() / z.norm() } else { C64::new(1.0, 0.0) };
        (phase / rep.norm(d), overlap)
    };
    let (start, o0) = factor(0);
    let (end, o1) = factor(last);
    let overlap = o0.min(o1);
    if !(overlap >= MIN_REFERENCE_OVERLAP) {
        return Err(HolonomyError::EndpointGauge { label, overlap });
    }
    Ok(EndpointGauge { start, end, reference, overlap })
}

/// Rights and lefts of `path` with each right phase-aligned to its predecessor
/// (Hilbert–Schmidt overlap real positive) and ⟨⟨E|D⟩⟩ unchanged.
pub fn realigned(path: &EigenPath, rep: &Representation) -> (Vec<CVector>, Vec<CVector>) {
    let mut rights = path.rights.clone();
    let mut lefts = path.lefts.clone();
    for k in 1..rights.len() {
        let z = rep.inner(&rights[k - 1], &rights[k]);
        if z.norm() > 0.0 {
            let u = z.conj() / z.norm();
            rights[k] *= u;
            lefts[k] /= u;
        }
    }
    (rights, lefts)
}

/// Open-system geometric phase of a labeled path,
/// `β = i[Σₖ ½(ln⟨⟨Eₖ|Dₖ₊₁⟩⟩ − ln⟨⟨Eₖ₊₁|Dₖ⟩⟩) + ln(a_N/a₀)]`.
///
/// Interior phases are re-aligned first, so β does not depend on the phases
/// or scales of interior eigenvectors. A step whose overlap argument exceeds π/2
/// fails with [`HolonomyError::BranchJump`].
pub fn geometric_phase(path: &EigenPath, phi: f64, rep: &Representation) -> Result<PhaseResult, HolonomyError> {
    let label = path.label.ok_or(HolonomyError::Unlabeled)?;
    if path.len() < 2 {
        return Err(HolonomyError::InvalidGrid("path needs at least two points"));
    }
    let gauge = endpoint_factors(path, phi, rep)?;
    let (rights, lefts) = realigned(path, rep);
    let mut sum = C64::new(0.0, 0.0);
    for k in 0..rights.len() - 1 {
        let forward = bilinear(&lefts[k], &rights[k + 1]);
        let backward = bilinear(&lefts[k + 1], &rights[k]);
        for z in [forward, backward] {
            let argument = z.arg();
            if !(argument.abs() <= core::f64::consts::FRAC_PI_2) {
                return Err(HolonomyError::BranchJump { step: k, argument });
            }
        }
        sum += (forward.ln() - backward.ln()) * 0.5;
    }
    sum += (gauge.end / gauge.start).ln();
    // β = i·sum; its real part is a phase and is reported in (−π, π].
    let beta = C64::new(wrap_phase(-sum.im), sum.re);
    Ok(PhaseResult {
        label,
        beta,
        grid_points: path.len(),
        window: (path.times[0], path.times[path.len() - 1]),
        min_gap: path.min_gap,
        min_overlap: path.min_overlap,
        endpoint_overlap: gauge.overlap,
    })
}

/// Representative of `x` modulo 2π in (−π, π].
pub(crate) fn wrap_phase(x: f64) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    let r = x - two_pi * (x / two_pi).round();
    if r <= -core::f64::consts::PI {
        r + two_pi
    } else {
        r
    }
}
