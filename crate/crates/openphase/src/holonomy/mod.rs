//! Eigenpath tracking, closed-limit labeling and the open-system Abelian
//! geometric phase along the STIRAP cycle.
//!
//! The Liouvillian along the cycle is evaluated either on the fixed-norm path
//! `(g₁, g₂) = g_ref·(sin θ, cos θ)` (default) or at the literal pulse amplitudes.
//! Each of the nine eigen-triples is tracked by optimal assignment of bilinear
//! overlaps, labeled 1–9 by continuation to the closed-system limit, and its phase
//! is the discrete parallel-transport sum
//! `β = i[Σₖ ½(ln⟨⟨Eₖ|Dₖ₊₁⟩⟩ − ln⟨⟨Eₖ₊₁|Dₖ⟩⟩) + ln(a_N/a₀)]`,
//! where `a₀, a_N` fix the endpoint gauge against the closed-system eigenoperator.

mod grid;
mod label;
mod phase;
mod representation;
mod sweep;
mod track;

pub use grid::ThetaGrid;
pub use label::{closed_operator_pair, label_paths_closed_limit, LabelAssignment, CLOSED_LIMIT_SCALE, HOMOTOPY_STEPS};
pub use phase::{endpoint_factors, geometric_phase, realigned, EndpointGauge, PhaseResult};
pub use representation::Representation;
pub use sweep::{phase_sweep, phases_at_point, sweep_row, SweepRow};
pub use track::{track_eigenpaths, EigenPath};

#[allow(unused_imports)]
use num_traits::Float;

use alloc::boxed::Box;

use crate::lindblad::LindbladError;
use crate::matops::MatError;
use crate::stirap::{PulseParams, StirapError};

/// Closed-limit labels of the nine eigenvalues.
pub const ALL_LABELS: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

/// Default degeneracy threshold relative to ‖L‖.
///
/// Gaps above it are resolved by double-precision eigenvectors to about 1e-4 and
/// the path stays in the non-degenerate regime; exact degeneracies sit near 1e-15.
pub const DEFAULT_DEGENERACY_REL: f64 = 1e-12;

/// How the Liouvillian is evaluated along the grid.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum FieldPath {
    /// `(g₁, g₂) = g_ref·(sin θ, cos θ)` with `g_ref = √((g01² + g02²)/2)`.
    #[default]
    ReferenceNorm,
    /// `(g₁, g₂) = norm·(sin θ, cos θ)`.
    FixedNorm(f64),
    /// Literal pulse amplitudes `(g₁(t), g₂(t))`.
    Pulsed,
}

impl FieldPath {
    /// Field amplitudes at grid point `(t, θ)`.
    pub fn fields(&self, t: f64, theta: f64, p: &PulseParams) -> (f64, f64) {
        match *self {
            FieldPath::ReferenceNorm => {
                let g = p.reference_norm();
                (g * theta.sin(), g * theta.cos())
            }
            FieldPath::FixedNorm(g) => (g * theta.sin(), g * theta.cos()),
            FieldPath::Pulsed => crate::stirap::pulses(t, p),
        }
    }
}

/// Tuning of the tracking pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackOptions {
    pub field_path: FieldPath,
    pub representation: Representation,
    /// Residual tolerance of each eigen-decomposition (relative to ‖L‖).
    pub eig_tol: f64,
    /// Eigenvalue gaps below `degeneracy_rel·‖L‖` count as degenerate.
    pub degeneracy_rel: f64,
    /// Smallest acceptable matched overlap |⟨⟨Eₖ|Dₖ₊₁⟩⟩| between neighbours.
    pub min_overlap: f64,
    /// Extra points inserted into a step whose overlap is too small.
    pub refine_points: usize,
    /// Keep going through degenerate or badly tracked points and record the
    /// diagnostics per path instead of failing.
    pub lenient: bool,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            field_path: FieldPath::ReferenceNorm,
            representation: Representation::coherence(),
            eig_tol: 1e-9,
            degeneracy_rel: DEFAULT_DEGENERACY_REL,
            min_overlap: 0.5,
            refine_points: 8,
            lenient: false,
        }
    }
}

/// Failures of the holonomy pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HolonomyError {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("invalid label {0} (expected 1-9)")]
    InvalidLabel(u8),
    #[error(transparent)]
    Pulse(#[from] StirapError),
    #[error(transparent)]
    Model(#[from] LindbladError),
    #[error("eigen-decomposition failed at theta = {theta}: {source}")]
    Linear { theta: f64, source: MatError },
    #[error("degenerate eigenvalues (label {label:?}) at theta = {theta}: relative gap {gap:e} below {tol:e}")]
    DegenerateRegime { label: Option<u8>, theta: f64, gap: f64, tol: f64 },
    #[error("lost track at theta = {theta}: best overlap {overlap} after refinement")]
    LostTrack { theta: f64, overlap: f64 },
    #[error("closed-limit label {label} is ambiguous (overlap ratio {ratio})")]
    AmbiguousLabel { label: u8, ratio: f64 },
    #[error("path carries no closed-limit label")]
    Unlabeled,
    #[error("phase step {step} has argument {argument} beyond pi/2")]
    BranchJump { step: usize, argument: f64 },
    #[error("endpoint gauge undefined for label {label}: reference overlap {overlap:e}")]
    EndpointGauge { label: u8, overlap: f64 },
    #[error("schedule entry {index}: {source}")]
    Sweep { index: usize, source: Box<HolonomyError> },
}

pub(crate) fn check_labels(labels: &[u8]) -> Result<(), HolonomyError> {
    match labels.iter().find(|l| !(1..=9).contains(*l)) {
        Some(&bad) => Err(HolonomyError::InvalidLabel(bad)),
        None => Ok(()),
    }
}
