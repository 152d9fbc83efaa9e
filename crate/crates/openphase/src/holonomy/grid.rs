use alloc::vec::Vec;

use super::HolonomyError;
use crate::stirap::{theta_of_t, PulseParams};

/// Grid uniform in time over `[t_min, t_max]` with the matching mixing angles.
///
/// Points are kept in time order, so θ increases for t0 > 0 and decreases for
/// t0 < 0; either way it is strictly monotone and inside (0, π/2).
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaGrid {
    times: Vec<f64>,
    thetas: Vec<f64>,
}

impl ThetaGrid {
    /// Default point count.
    pub const DEFAULT_POINTS: usize = 2000;
    /// Default window `[−6τ, 8τ]` in units of τ.
    pub const DEFAULT_WINDOW: (f64, f64) = (-6.0, 8.0);
    /// Window inside which the adiabaticity condition holds, in units of τ.
    pub const ADIABATIC_WINDOW: (f64, f64) = (-3.06, 4.39);

    pub fn uniform_in_time(p: &PulseParams, t_min: f64, t_max: f64, points: usize) -> Result<Self, HolonomyError> {
        p.validate()?;
        if points < 2 {
            return Err(HolonomyError::InvalidGrid("need at least two points"));
        }
        if !(t_min < t_max) || !t_min.is_finite() || !t_max.is_finite() {
            return Err(HolonomyError::InvalidGrid("need finite t_min < t_max"));
        }
        if p.t0 == 0.0 {
            return Err(HolonomyError::Pulse(crate::stirap::StirapError::DegenerateDelay));
        }
        let step = (t_max - t_min) / (points - 1) as f64;
        let times: Vec<f64> =
            (0..points).map(|k| if k + 1 == points { t_max } else { t_min + step * k as f64 }).collect();
        Self::from_times(p, times)
    }

    /// Default grid in units of the pulse width: N = 2000 over [−6τ, 8τ].
    pub fn reference(p: &PulseParams) -> Result<Self, HolonomyError> {
        let (a, b) = Self::DEFAULT_WINDOW;
        Self::uniform_in_time(p, a * p.tau, b * p.tau, Self::DEFAULT_POINTS)
    }

    /// Grid through explicit time points.
    pub fn from_times(p: &PulseParams, times: Vec<f64>) -> Result<Self, HolonomyError> {
        let thetas: Vec<f64> = times.iter().map(|&t| theta_of_t(t, p)).collect();
        let inside = thetas.iter().all(|&th| th > 0.0 && th < core::f64::consts::FRAC_PI_2);
        if !inside {
            return Err(HolonomyError::InvalidGrid("mixing angle saturates at 0 or pi/2 inside the window"));
        }
        let sign = if p.t0 > 0.0 { 1.0 } else { -1.0 };
        if thetas.windows(2).any(|w| !(sign * (w[1] - w[0]) > 0.0)) || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(HolonomyError::InvalidGrid("mixing angle is not strictly monotone on the grid"));
        }
        Ok(ThetaGrid { times, thetas })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// (t_min, t_max).
    pub fn window(&self) -> (f64, f64) {
        (self.times[0], self.times[self.times.len() - 1])
    }
}
