//! Gaussian STIRAP pulses, the mixing angle θ(t), the adiabaticity diagnostic and
//! the closed-system adiabatic eigenbasis.

#[allow(unused_imports)]
use num_traits::Float;

use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::lindblad::build_hamiltonian;
use crate::matops::{CMatrix, CVector, C64};

/// Failures of the pulse layer.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum StirapError {
    #[error("pulse parameters invalid: tau and amplitudes must be positive and finite")]
    InvalidPulse,
    #[error("zero pulse delay makes the mixing angle constant")]
    DegenerateDelay,
    #[error("mixing angle {0} outside (0, pi/2)")]
    AngleOutOfRange(f64),
    #[error("both pulses underflow at t = {0}")]
    Underflow(f64),
}

/// Gaussian pulse pair g₁ = g01·exp(−(t−t0)²/τ²), g₂ = g02·exp(−t²/τ²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    pub g01: f64,
    pub g02: f64,
    pub t0: f64,
    pub tau: f64,
    pub phi: f64,
}

impl PulseParams {
    /// Reference parameters: g01τ = g02τ = 15, t0 = 4τ/3, τ = 1, φ = π/4.
    pub fn reference() -> Self {
        PulseParams { g01: 15.0, g02: 15.0, t0: 4.0 / 3.0, tau: 1.0, phi: FRAC_PI_4 }
    }

    /// Same pulses with the order reversed (t0 → −t0).
    pub fn reversed(&self) -> Self {
        PulseParams { t0: -self.t0, ..*self }
    }

    pub fn validate(&self) -> Result<(), StirapError> {
        let ok = self.tau > 0.0
            && self.g01 > 0.0
            && self.g02 > 0.0
            && [self.g01, self.g02, self.t0, self.tau, self.phi].iter().all(|x| x.is_finite());
        if ok {
            Ok(())
        } else {
            Err(StirapError::InvalidPulse)
        }
    }

    /// Field norm used for the fixed-norm path, √((g01² + g02²)/2).
    pub fn reference_norm(&self) -> f64 {
        ((self.g01 * self.g01 + self.g02 * self.g02) / 2.0).sqrt()
    }
}

/// (g₁(t), g₂(t)).
pub fn pulses(t: f64, p: &PulseParams) -> (f64, f64) {
    let tau2 = p.tau * p.tau;
    (p.g01 * (-(t - p.t0).powi(2) / tau2).exp(), p.g02 * (-(t * t) / tau2).exp())
}

/// Exponent u(t) with tan θ = (g01/g02)·e^u.
fn log_tan_theta(t: f64, p: &PulseParams) -> f64 {
    (p.g01 / p.g02).ln() + (2.0 * t * p.t0 - p.t0 * p.t0) / (p.tau * p.tau)
}

/// θ(t) from tan θ = (g01/g02)·exp((2t·t0 − t0²)/τ²).
pub fn theta_of_t(t: f64, p: &PulseParams) -> f64 {
    let u = log_tan_theta(t, p);
    // atan(e^u) without overflow on either tail.
    if u > 0.0 {
        FRAC_PI_2 - (-u).exp().atan()
    } else {
        u.exp().atan()
    }
}

/// Inverse of [`theta_of_t`]: t = [τ²·ln((g02/g01)·tan θ) + t0²]/(2·t0).
pub fn t_of_theta(theta: f64, p: &PulseParams) -> Result<f64, StirapError> {
    if p.t0 == 0.0 {
        return Err(StirapError::DegenerateDelay);
    }
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(StirapError::AngleOutOfRange(theta));
    }
    let log_tan = if theta > FRAC_PI_4 { -(FRAC_PI_2 - theta).tan().ln() } else { theta.tan().ln() };
    Ok((p.tau * p.tau * ((p.g02 / p.g01).ln() + log_tan) + p.t0 * p.t0) / (2.0 * p.t0))
}

/// dθ/dt = (t0/τ²)·sin 2θ, evaluated through tan θ to stay exact on the tails.
pub fn dtheta_dt(t: f64, p: &PulseParams) -> f64 {
    let u = log_tan_theta(t, p);
    // sin 2θ = 2 tanθ/(1 + tan²θ) = 1/cosh(u) for tanθ = e^u.
    let sin2 = if u.abs() > 700.0 { 2.0 * (-u.abs()).exp() } else { 1.0 / u.cosh() };
    p.t0 / (p.tau * p.tau) * sin2
}

/// |dθ/dt| / √(g₁² + g₂²); fails with `Underflow` when both pulses fall below
/// 1e-300 of their peak.
pub fn try_adiabaticity_lhs(t: f64, p: &PulseParams) -> Result<f64, StirapError> {
    let (g1, g2) = pulses(t, p);
    if g1 < 1e-300 * p.g01 && g2 < 1e-300 * p.g02 {
        return Err(StirapError::Underflow(t));
    }
    Ok(dtheta_dt(t, p).abs() / g1.hypot(g2))
}

/// Adiabaticity left-hand side with `+∞` as the underflow sentinel.
pub fn adiabaticity_lhs(t: f64, p: &PulseParams) -> f64 {
    try_adiabaticity_lhs(t, p).unwrap_or(f64::INFINITY)
}

/// Closed-system adiabatic state labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateLabel {
    /// Dark state |0⟩.
    Zero,
    /// Bright-plus state |+⟩.
    Plus,
    /// Bright-minus state |−⟩.
    Minus,
}

impl StateLabel {
    pub const ALL: [StateLabel; 3] = [StateLabel::Zero, StateLabel::Plus, StateLabel::Minus];

    pub fn index(self) -> usize {
        match self {
            StateLabel::Zero => 0,
            StateLabel::Plus => 1,
            StateLabel::Minus => 2,
        }
    }

    /// Energy in units of the field norm.
    pub fn energy_sign(self) -> f64 {
        match self {
            StateLabel::Zero => 0.0,
            StateLabel::Plus => 1.0,
            StateLabel::Minus => -1.0,
        }
    }
}

/// Energies {0, E₊, E₋} and states {|0⟩, |+⟩, |−⟩} at mixing angle θ.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedEigenSystem {
    pub energies: [f64; 3],
    pub states: [CVector; 3],
    pub theta: f64,
}

impl ClosedEigenSystem {
    pub fn state(&self, n: StateLabel) -> &CVector {
        &self.states[n.index()]
    }

    /// Operator |n⟩⟨m|.
    pub fn outer(&self, n: StateLabel, m: StateLabel) -> CMatrix {
        self.state(n) * self.state(m).adjoint()
    }
}

fn closed_state(n: StateLabel, theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    match n {
        StateLabel::Zero => [ct, -st, 0.0],
        StateLabel::Plus => [st * sp, ct * sp, cp],
        StateLabel::Minus => [st * cp, ct * cp, -sp],
    }
}

fn closed_state_derivative(n: StateLabel, theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    match n {
        StateLabel::Zero => [-st, -ct, 0.0],
        StateLabel::Plus => [ct * sp, -st * sp, 0.0],
        StateLabel::Minus => [ct * cp, -st * cp, 0.0],
    }
}

fn to_vector(a: [f64; 3]) -> CVector {
    CVector::from_fn(3, |k, _| C64::new(a[k], 0.0))
}

/// Adiabatic eigenbasis with field norm `norm` (E± = ±norm):
/// |0⟩ = cosθ|1⟩ − sinθ|2⟩, |±⟩ built from the bright state and |3⟩ with angle φ.
pub fn closed_eigensystem(theta: f64, phi: f64, norm: f64) -> ClosedEigenSystem {
    ClosedEigenSystem {
        energies: [0.0, norm, -norm],
        states: StateLabel::ALL.map(|n| to_vector(closed_state(n, theta, phi))),
        theta,
    }
}

/// Hamiltonian with (g₁, g₂) = norm·(sin θ, cos θ).
pub fn hamiltonian_at_angle(theta: f64, norm: f64) -> CMatrix {
    build_hamiltonian(norm * theta.sin(), norm * theta.cos())
}

/// ⟨n(θ)|d/dθ|n(θ)⟩ from the analytic derivative of the adiabatic states.
pub fn closed_berry_integrand(n: StateLabel, theta: f64, phi: f64) -> C64 {
    let s = closed_state(n, theta, phi);
    let d = closed_state_derivative(n, theta, phi);
    C64::new(s.iter().zip(&d).map(|(a, b)| a * b).sum(), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pulse_plug_in_values() {
        let p = PulseParams { g01: 3.0, g02: 5.0, t0: 1.2, tau: 0.8, phi: FRAC_PI_4 };
        let (a, b) = pulses(0.0, &p);
        assert!((a - 3.0 * (-(1.2f64 / 0.8).powi(2)).exp()).abs() < 1e-15 && (b - 5.0).abs() < 1e-15);
        let (a, b) = pulses(1.2, &p);
        assert!((a - 3.0).abs() < 1e-15 && (b - 5.0 * (-(1.2f64 / 0.8).powi(2)).exp()).abs() < 1e-15);
        let q = PulseParams::reference();
        let (a, b) = pulses(q.t0 / 2.0, &q);
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn theta_at_crossing_and_limits() {
        let p = PulseParams::reference();
        assert!((theta_of_t(p.t0 / 2.0, &p) - FRAC_PI_4).abs() < 1e-15);
        assert!(theta_of_t(-1e3, &p) < 1e-300);
        assert!((theta_of_t(1e3, &p) - FRAC_PI_2).abs() < 1e-15);
        let r = p.reversed();
        assert!(theta_of_t(-50.0, &r) > 1.57 && theta_of_t(50.0, &r) < 1e-10);
    }

    #[test]
    fn inverse_requires_delay_and_open_interval() {
        let mut p = PulseParams::reference();
        assert_eq!(t_of_theta(0.0, &p), Err(StirapError::AngleOutOfRange(0.0)));
        p.t0 = 0.0;
        assert_eq!(t_of_theta(0.3, &p), Err(StirapError::DegenerateDelay));
    }

    #[test]
    fn dtheta_matches_finite_difference() {
        let p = PulseParams { g01: 12.0, g02: 15.0, t0: 4.0 / 3.0, tau: 1.0, phi: FRAC_PI_4 };
        for &t in &[-3.0, -0.5, 0.6, 2.0, 4.0] {
            let h = 1e-5;
            let fd = (theta_of_t(t + h, &p) - theta_of_t(t - h, &p)) / (2.0 * h);
            assert!((fd - dtheta_dt(t, &p)).abs() < 1e-8 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn adiabaticity_reference_values() {
        let p = PulseParams::reference();
        let expected = (4.0 / 3.0) / (2f64.sqrt() * 15.0 * (-4.0f64 / 9.0).exp());
        assert!((adiabaticity_lhs(p.t0 / 2.0, &p) - expected).abs() < 1e-14);
        assert!((expected - 0.0973).abs() < 1e-3);
        assert!(adiabaticity_lhs(6.0, &p) > 1.0);
        assert_eq!(adiabaticity_lhs(1e4, &p), f64::INFINITY);
        assert!(matches!(try_adiabaticity_lhs(-1e4, &p), Err(StirapError::Underflow(_))));
    }

    #[test]
    fn closed_states_at_endpoints() {
        let s = closed_eigensystem(0.0, FRAC_PI_4, 1.0);
        assert_eq!(s.state(StateLabel::Zero)[0], C64::new(1.0, 0.0));
        let s = closed_eigensystem(FRAC_PI_2, FRAC_PI_4, 1.0);
        assert!((s.state(StateLabel::Zero)[1] + C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(s.state(StateLabel::Zero)[0].norm() < 1e-15);
    }

    #[test]
    fn closed_states_diagonalize_the_hamiltonian() {
        for &theta in &[0.1, 0.7, 1.3] {
            let s = closed_eigensystem(theta, FRAC_PI_4, 5.0);
            let h = hamiltonian_at_angle(theta, 5.0);
            for n in StateLabel::ALL {
                let v = s.state(n);
                assert!((&h * v - v * C64::new(s.energies[n.index()], 0.0)).norm() < 1e-13);
                assert!(v[2].norm() > 0.0 || n == StateLabel::Zero);
            }
            assert_eq!(s.state(StateLabel::Zero)[2], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn berry_integrand_vanishes() {
        assert_eq!(closed_berry_integrand(StateLabel::Zero, 0.4, FRAC_PI_4).norm(), 0.0);
        assert!(closed_berry_integrand(StateLabel::Plus, core::f64::consts::FRAC_PI_3, FRAC_PI_4).norm() < 1e-16);
    }
}
